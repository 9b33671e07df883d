// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "pgreserve/auction.hpp"
#include "pgreserve/lowess.hpp"
#include "pgreserve/pricing.hpp"
#include "pgreserve/rng.hpp"
#include "pgreserve/simulator.hpp"
#include "pgreserve/surface.hpp"

using namespace pgreserve;

namespace {

const auto kDist = BidDistribution::log_normal(0.0, 0.5);

void BM_MonteCarlo_Parallel(benchmark::State& st)
{
  for (auto _ : st)
    benchmark::DoNotOptimize(monte_carlo_auction(kDist, 5, static_cast<std::int64_t>(st.range(0)), 1));
}

void BM_MonteCarlo_Serial(benchmark::State& st)
{
  for (auto _ : st)
    benchmark::DoNotOptimize(reference::monte_carlo_auction(kDist, 5, static_cast<std::int64_t>(st.range(0)), 1));
}

MarketForecast market(std::int64_t S)
{
  MarketForecast f;
  f.supply = S;
  f.demand = 2.5 * static_cast<double>(S);
  return f;
}

void BM_Schedule_Parallel(benchmark::State& st)
{
  const auto curves = AuctionCurves::from_distribution(kDist);
  const auto f = market(st.range(0));
  RiskParams risk;
  risk.lambda = 0.3;
  for (auto _ : st)
    benchmark::DoNotOptimize(reserve_schedule(f, curves, risk));
}

void BM_Schedule_Serial(benchmark::State& st)
{
  const auto curves = AuctionCurves::from_distribution(kDist);
  const auto f = market(st.range(0));
  RiskParams risk;
  risk.lambda = 0.3;
  for (auto _ : st)
    benchmark::DoNotOptimize(reference::reserve_schedule(f, curves, risk));
}

std::vector<SurfacePoint> surface_data()
{
  Rng rng(3);
  std::vector<SurfacePoint> pts;
  for (int d = 0; d < 14; ++d)
    for (int h = 0; h < 24; ++h)
      pts.push_back({double(d), double(h), 100.0 + 40.0 * std::sin(h / 24.0 * 6.283) + rng.normal(0.0, 5.0)});
  return pts;
}

void BM_LqrPredict_Parallel(benchmark::State& st)
{
  const auto pts = surface_data();
  const auto model = fit_lqr(pts, 0.3);
  for (auto _ : st)
    benchmark::DoNotOptimize(predict_all(model, pts));
}

void BM_LqrPredict_Serial(benchmark::State& st)
{
  const auto pts = surface_data();
  const auto model = fit_lqr(pts, 0.3);
  for (auto _ : st)
    benchmark::DoNotOptimize(reference::predict_all(model, pts));
}

std::vector<CurvePoint> scatter(std::int64_t n)
{
  Rng rng(5);
  std::vector<CurvePoint> pts;
  for (std::int64_t i = 0; i < n; ++i) {
    const double x = 1.0 + static_cast<double>(rng.below(40));
    pts.push_back({x, std::log(x) + rng.normal(0.0, 0.3)});
  }
  return pts;
}

void BM_Rlwr_Parallel(benchmark::State& st)
{
  const auto pts = scatter(st.range(0));
  for (auto _ : st)
    benchmark::DoNotOptimize(fit_rlwr(pts, {0.5, 2}));
}

void BM_Rlwr_Serial(benchmark::State& st)
{
  const auto pts = scatter(st.range(0));
  for (auto _ : st)
    benchmark::DoNotOptimize(reference::fit_rlwr(pts, {0.5, 2}));
}

SimConfig batch_config()
{
  SimConfig c;
  c.forecast = market(200);
  c.curves = AuctionCurves::uniform_closed_form(1.0);
  c.price_model = PriceModel::uniform(0.0, 1.0);
  c.seed = 9;
  return c;
}

void BM_Batch_Parallel(benchmark::State& st)
{
  const auto c = batch_config();
  for (auto _ : st)
    benchmark::DoNotOptimize(run_batch(c, static_cast<int>(st.range(0))));
}

void BM_Batch_Serial(benchmark::State& st)
{
  const auto c = batch_config();
  for (auto _ : st)
    benchmark::DoNotOptimize(reference::run_batch(c, static_cast<int>(st.range(0))));
}

} // namespace

BENCHMARK(BM_MonteCarlo_Parallel)->Arg(1 << 18)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MonteCarlo_Serial)->Arg(1 << 18)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Schedule_Parallel)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Schedule_Serial)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LqrPredict_Parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LqrPredict_Serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Rlwr_Parallel)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Rlwr_Serial)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Batch_Parallel)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Batch_Serial)->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
