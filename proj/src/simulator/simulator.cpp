#include <algorithm>
#include <cmath>
#include <sstream>

#include "pgreserve/error.hpp"
#include "pgreserve/simulator.hpp"

namespace pgreserve {

PriceModel PriceModel::constant(double price)
{
  if (!(std::isfinite(price) && price >= 0.0))
    throw ValidationError("constant request price must be finite and non-negative");
  PriceModel m;
  m.kind_ = Kind::Constant;
  m.a_ = price;
  return m;
}

PriceModel PriceModel::uniform(double lo, double hi)
{
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo >= 0.0 && hi >= lo))
    throw ValidationError("uniform request prices need 0 <= lo <= hi");
  PriceModel m;
  m.kind_ = Kind::Uniform;
  m.a_ = lo;
  m.b_ = hi;
  return m;
}

PriceModel PriceModel::log_normal(double mu, double sigma)
{
  if (!std::isfinite(mu) || !(std::isfinite(sigma) && sigma >= 0.0))
    throw ValidationError("log-normal request prices need finite mu and sigma >= 0");
  PriceModel m;
  m.kind_ = Kind::LogNormal;
  m.a_ = mu;
  m.b_ = sigma;
  return m;
}

PriceModel PriceModel::empirical(std::vector<double> prices)
{
  if (prices.empty())
    throw ValidationError("empirical request prices need a non-empty sample");
  for (double p : prices)
    if (!(std::isfinite(p) && p >= 0.0))
      throw ValidationError("empirical request prices must be finite and non-negative");
  PriceModel m;
  m.kind_ = Kind::Empirical;
  m.sample_ = std::move(prices);
  return m;
}

PriceModel PriceModel::log_normal_fit(const std::vector<double>& prices)
{
  std::vector<double> logs;
  for (double p : prices)
    if (p > 0.0 && std::isfinite(p))
      logs.push_back(std::log(p));
  if (logs.size() < 2)
    throw DataError("need at least two positive prices to fit a log-normal");
  double mean = 0.0;
  for (double l : logs)
    mean += l;
  mean /= static_cast<double>(logs.size());
  double ss = 0.0;
  for (double l : logs)
    ss += (l - mean) * (l - mean);
  return log_normal(mean, std::sqrt(ss / static_cast<double>(logs.size() - 1)));
}

std::string PriceModel::describe() const
{
  std::ostringstream os;
  switch (kind_) {
  case Kind::Constant: os << "constant(" << a_ << ")"; break;
  case Kind::Uniform: os << "uniform(" << a_ << ", " << b_ << ")"; break;
  case Kind::LogNormal: os << "log-normal(mu=" << a_ << ", sigma=" << b_ << ")"; break;
  case Kind::Empirical: os << "empirical(n=" << sample_.size() << ")"; break;
  }
  return os.str();
}

double PriceModel::draw(Rng& rng) const
{
  switch (kind_) {
  case Kind::Constant: return a_;
  case Kind::Uniform: return rng.uniform(a_, b_);
  case Kind::LogNormal: return std::exp(a_ + b_ * rng.normal());
  case Kind::Empirical: return sample_[rng.below(sample_.size())];
  }
  return 0.0;
}

double SimConfig::effective_rate() const
{
  return arrival_rate ? *arrival_rate : forecast.demand / forecast.sale_end;
}

void SimConfig::validate() const
{
  forecast.validate();
  risk.validate();
  const double rate = effective_rate();
  if (!(std::isfinite(rate) && rate >= 0.0))
    throw ValidationError("arrival rate must be finite and non-negative");
  if (repetitions < 1)
    throw ValidationError("repetitions must be >= 1");
}

std::vector<BuyRequest> gen_requests(double rate, double horizon, const PriceModel& prices,
                                     std::uint64_t seed)
{
  if (!(std::isfinite(rate) && rate >= 0.0))
    throw ValidationError("arrival rate must be finite and non-negative");
  if (!(std::isfinite(horizon) && horizon > 0.0))
    throw ValidationError("request horizon must be positive");
  std::vector<BuyRequest> out;
  if (rate == 0.0)
    return out;

  Rng arrivals(derive_seed(seed, 0));
  Rng offers(derive_seed(seed, 1));
  double t = 0.0;
  for (;;) {
    const double next = t + arrivals.exponential(rate);
    if (next > horizon)
      break;
    // A zero gap would break strict ordering; it needs a u of exactly 1.
    if (!(next > t))
      continue;
    t = next;
    out.push_back({t, prices.draw(offers)});
  }
  return out;
}

Simulation::Simulation(SimConfig config)
  : config_((config.validate(), std::move(config)))
  , engine_(config_.forecast, config_.curves, config_.risk)
  , guarantee_(guarantee_check(config_.forecast, config_.curves, config_.risk.lambda))
{
}

std::uint64_t Simulation::run_seed(int i) const
{
  return i == 0 ? config_.seed : derive_seed(config_.seed, static_cast<std::uint64_t>(i));
}

SimTrace Simulation::run(std::uint64_t seed) const
{
  const auto requests =
    gen_requests(config_.effective_rate(), config_.forecast.sale_end, config_.price_model, seed);

  SimTrace trace;
  InventoryState state(config_.forecast.supply);
  trace.events.reserve(requests.size());
  for (const auto& req : requests) {
    const Decision d = engine_.decide(state, req);
    SimEvent e;
    e.time = req.time;
    e.price = req.price;
    e.reserve = d.reserve;
    e.accepted = d.accepted;
    e.remaining = d.remaining;
    e.reserve_after = d.remaining > 0 ? engine_.reserve(d.remaining)
                                      : std::numeric_limits<double>::infinity();
    trace.events.push_back(e);
  }
  trace.contracts = state.accepted();
  trace.report =
    revenue_report(trace.contracts, config_.forecast, config_.curves, config_.risk, guarantee_);
  return trace;
}

SimTrace run_simulation(const SimConfig& config)
{
  Simulation sim(config);
  return sim.run(sim.run_seed(0));
}

namespace {

void summarize(BatchSummary& b)
{
  const auto n = static_cast<double>(b.runs.size());
  double acc = 0.0, acc2 = 0.0, up = 0.0, up2 = 0.0;
  int dominated = 0;
  b.uplift_runs = 0;
  for (const auto& r : b.runs) {
    const auto a = static_cast<double>(r.report.n_accepted);
    acc += a;
    acc2 += a * a;
    if (r.report.uplift) {
      up += *r.report.uplift;
      up2 += *r.report.uplift * *r.report.uplift;
      ++b.uplift_runs;
    }
    if (r.report.dominates())
      ++dominated;
  }
  b.accepted_mean = acc / n;
  b.accepted_std = n > 1 ? std::sqrt(std::max((acc2 - n * b.accepted_mean * b.accepted_mean) / (n - 1.0), 0.0)) : 0.0;
  if (b.uplift_runs > 0) {
    const double m = static_cast<double>(b.uplift_runs);
    b.uplift_mean = up / m;
    b.uplift_std = b.uplift_runs > 1 ? std::sqrt(std::max((up2 - m * b.uplift_mean * b.uplift_mean) / (m - 1.0), 0.0)) : 0.0;
  }
  b.dominance_fraction = static_cast<double>(dominated) / n;
}

} // namespace

BatchSummary run_batch(const SimConfig& config, int n_runs)
{
  if (n_runs < 1)
    throw ValidationError("run_batch needs n_runs >= 1");
  const Simulation sim(config);
  BatchSummary b;
  b.runs.resize(static_cast<std::size_t>(n_runs));

#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < n_runs; ++i)
    b.runs[static_cast<std::size_t>(i)] = sim.run(sim.run_seed(i));

  summarize(b);
  return b;
}

namespace reference {

BatchSummary run_batch(const SimConfig& config, int n_runs)
{
  if (n_runs < 1)
    throw ValidationError("run_batch needs n_runs >= 1");
  const Simulation sim(config);
  BatchSummary b;
  for (int i = 0; i < n_runs; ++i)
    b.runs.push_back(sim.run(sim.run_seed(i)));
  summarize(b);
  return b;
}

} // namespace reference

} // namespace pgreserve
