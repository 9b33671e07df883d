#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "pgreserve/auction.hpp"
#include "pgreserve/lowess.hpp"

using namespace pgreserve;

namespace {

std::vector<CurvePoint> line(int n, double slope, double intercept)
{
  std::vector<CurvePoint> pts;
  for (int i = 0; i < n; ++i)
    pts.push_back({0.5 * i, slope * 0.5 * i + intercept});
  return pts;
}

std::vector<AuctionObservation> synthetic_auctions(const BidDistribution& d, int min_xi,
                                                   int max_xi, int per_level, std::uint64_t seed)
{
  Rng rng(seed);
  std::vector<AuctionObservation> out;
  for (int xi = min_xi; xi <= max_xi; ++xi)
    for (int t = 0; t < per_level; ++t) {
      std::vector<double> bids(static_cast<std::size_t>(xi));
      for (auto& b : bids)
        b = d.draw(rng);
      std::sort(bids.begin(), bids.end(), std::greater<>());
      out.push_back({xi, xi > 1 ? bids[1] : 0.0, bids[0]});
    }
  return out;
}

} // namespace

TEST_CASE("fitted curves interpolate knots and clamp outside")
{
  FittedCurve c({1.0, 2.0, 4.0}, {0.0, 1.0, 3.0});
  CHECK(c(1.0) == 0.0);
  CHECK(c(2.0) == 1.0);
  CHECK(c(3.0) == doctest::Approx(2.0));
  CHECK(c(-5.0) == 0.0);
  CHECK(c(10.0) == 3.0);
  CHECK(c.range() == std::pair{1.0, 4.0});
  CHECK_THROWS_AS(FittedCurve({1.0, 1.0}, {0.0, 0.0}), ValidationError);
  CHECK(c.floored(0.5)(1.0) == 0.5);
}

TEST_CASE("RLWR reproduces lines and constants")
{
  for (double frac : {0.3, 0.5, 1.0}) {
    auto c = fit_rlwr(line(30, 2.0, 1.0), {frac, 2});
    REQUIRE(c.size() == 30);
    for (std::size_t i = 0; i < c.size(); ++i)
      CHECK(std::abs(c.ys()[i] - (2.0 * c.xs()[i] + 1.0)) < 1e-6);
  }
  auto flat = fit_rlwr(line(12, 0.0, 3.5));
  for (double y : flat.ys())
    CHECK(y == doctest::Approx(3.5));
}

TEST_CASE("robustness iterations suppress a gross outlier")
{
  Rng rng(31);
  std::vector<CurvePoint> pts;
  for (int i = 0; i < 40; ++i) {
    const double x = 1.0 + 0.25 * i;
    pts.push_back({x, 2.0 * x + 1.0 + rng.normal(0.0, 0.1)});
  }
  const std::size_t outlier = 17;
  pts[outlier].y *= 50.0;

  auto deviation = [&](const FittedCurve& c) {
    double worst = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
      if (i != outlier)
        worst = std::max(worst, std::abs(c(pts[i].x) - (2.0 * pts[i].x + 1.0)));
    return worst;
  };
  const double plain = deviation(fit_rlwr(pts, {0.5, 0}));
  const double robust = deviation(fit_rlwr(pts, {0.5, 2}));
  CHECK(robust < 0.1 * plain);
}

TEST_CASE("RLWR handles repeated x and sparse neighbourhoods")
{
  std::vector<CurvePoint> pts = {{1, 1}, {1, 3}, {1, 2}, {2, 4}, {2, 4}, {3, 6}, {3, 6}, {9, 18}};
  auto c = fit_rlwr(pts, {0.2, 1});
  CHECK(c.size() == 4);
  for (double y : c.ys())
    CHECK(std::isfinite(y));

  CHECK_THROWS_AS(fit_rlwr(std::vector<CurvePoint>{{1, 1}, {2, 2}}), DataError);
  CHECK_THROWS_AS(fit_rlwr(std::vector<CurvePoint>(6, {2.0, 1.0})), DataError);
  CHECK_THROWS_AS(fit_rlwr(line(10, 1, 0), {0.0, 2}), ValidationError);
}

TEST_CASE("parallel and brute-force RLWR agree bit for bit")
{
  Rng rng(4);
  std::vector<CurvePoint> pts;
  for (int i = 0; i < 300; ++i) {
    const double x = std::floor(rng.uniform(0.0, 60.0));
    pts.push_back({x, std::sqrt(x) + rng.normal(0.0, 0.3) + (i % 37 == 0 ? 10.0 : 0.0)});
  }
  for (int iters : {0, 1, 3}) {
    const RlwrOptions opt{0.3, iters};
    auto a = fit_rlwr(pts, opt);
    auto b = reference::fit_rlwr(pts, opt);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a.xs()[i] == b.xs()[i]);
      CHECK(a.ys()[i] == b.ys()[i]);
    }
  }
}

TEST_CASE("bootstrap resampling")
{
  std::vector<int> items(100);
  for (int i = 0; i < 100; ++i)
    items[static_cast<std::size_t>(i)] = i * 3;
  const auto same = resample<int>(items, 1.0, 9);
  CHECK(same.size() == 100);
  const auto a = resample<int>(items, 1.5, 9);
  const auto b = resample<int>(items, 1.5, 9);
  CHECK(a.size() == 150);
  CHECK(a == b);
  for (int v : a)
    CHECK(std::find(items.begin(), items.end(), v) != items.end());
  CHECK(resample<int>(items, 1.5, 10) != a);
  CHECK_THROWS_AS(resample<int>(items, 0.0, 1), ValidationError);
}

TEST_CASE("auction curves learned from uniform bids")
{
  const auto logs = synthetic_auctions(BidDistribution::uniform(1.0), 2, 10, 4000, 77);
  const auto curves = build_auction_curves(logs);
  REQUIRE(curves.bins.size() == 9);
  for (int xi = 2; xi <= 10; ++xi)
    CHECK(std::abs(curves.phi(xi) - (xi - 1.0) / (xi + 1.0)) < 0.05);
}

TEST_CASE("single-bidder logs give a zero payment curve")
{
  std::vector<AuctionObservation> logs(50, {1, 0.0, 0.8});
  const auto curves = build_auction_curves(logs);
  for (double xi : {0.0, 1.0, 3.0, 10.0}) {
    CHECK(curves.phi(xi) == 0.0);
    CHECK(curves.psi(xi) == 0.0);
  }
  CHECK(curves.pi(1.0) == doctest::Approx(0.8));
}

TEST_CASE("learned winning-bid curve never drops below the payment curve")
{
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    auto logs = synthetic_auctions(BidDistribution::log_normal(-0.5, 0.9), 1, 14, 300, seed);
    CurveFitOptions opt;
    opt.resample_rate = 1.5;
    opt.seed = seed;
    const auto c = build_auction_curves(logs, opt);
    for (double xi = 0.0; xi <= 16.0; xi += 0.1) {
      CHECK(c.pi(xi) >= c.phi(xi));
      CHECK(c.phi(xi) >= 0.0);
      CHECK(c.psi(xi) >= 0.0);
    }
  }
}

TEST_CASE("too few competition levels is a data error")
{
  std::vector<AuctionObservation> logs = {{2, 0.1, 0.2}, {2, 0.2, 0.3}, {3, 0.3, 0.5}};
  CHECK_THROWS_AS(build_auction_curves(logs), DataError);
}
