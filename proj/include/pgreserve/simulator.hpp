#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pgreserve/pricing.hpp"
#include "pgreserve/revenue.hpp"
#include "pgreserve/rng.hpp"

namespace pgreserve {

/// Distribution of the guaranteed prices that buyers propose.
class PriceModel
{
public:
  enum class Kind
  {
    Constant,
    Uniform,
    LogNormal,
    Empirical,
  };

  static PriceModel constant(double price);
  static PriceModel uniform(double lo, double hi);
  static PriceModel log_normal(double mu, double sigma);
  /// Bootstrap from observed prices.
  static PriceModel empirical(std::vector<double> prices);
  /// Log-normal with the log-mean and log-std of the positive observations.
  static PriceModel log_normal_fit(const std::vector<double>& prices);

  Kind kind() const { return kind_; }
  double a() const { return a_; }
  double b() const { return b_; }
  const std::vector<double>& sample() const { return sample_; }
  std::string describe() const;

  double draw(Rng& rng) const;

private:
  Kind kind_ = Kind::Constant;
  double a_ = 0.0;
  double b_ = 0.0;
  std::vector<double> sample_;
};

struct SimConfig
{
  MarketForecast forecast;
  AuctionCurves curves = AuctionCurves::uniform_closed_form(1.0);
  RiskParams risk;
  /// Requests per time unit; empty means Q / T (demand-sized request flow).
  std::optional<double> arrival_rate;
  PriceModel price_model = PriceModel::constant(0.0);
  std::uint64_t seed = 0;
  int repetitions = 1;

  double effective_rate() const;
  void validate() const;
};

/// Poisson arrivals on [0, horizon] with i.i.d. prices. Arrival times and
/// prices come from separate sub-streams of `seed`.
std::vector<BuyRequest> gen_requests(double rate, double horizon, const PriceModel& prices,
                                     std::uint64_t seed);

struct SimEvent
{
  double time = 0.0;
  double price = 0.0;
  double reserve = 0.0;          // reserve in force when the request arrived
  bool accepted = false;
  std::int64_t remaining = 0;    // after the decision
  double reserve_after = 0.0;    // reserve for the next request (inf when sold out)
};

struct SimTrace
{
  std::vector<SimEvent> events;
  std::vector<Contract> contracts;
  RevenueReport report;
};

/// Everything a run needs that does not depend on the run's seed.
class Simulation
{
public:
  explicit Simulation(SimConfig config);

  const SimConfig& config() const { return config_; }
  const DecisionEngine& engine() const { return engine_; }
  const GuaranteeCheck& guarantee() const { return guarantee_; }

  SimTrace run(std::uint64_t seed) const;
  /// Seed of run i of a batch.
  std::uint64_t run_seed(int i) const;

private:
  SimConfig config_;
  DecisionEngine engine_;
  GuaranteeCheck guarantee_;
};

SimTrace run_simulation(const SimConfig& config);

struct BatchSummary
{
  std::vector<SimTrace> runs;
  double uplift_mean = 0.0;
  double uplift_std = 0.0;
  int uplift_runs = 0;          // runs with a defined uplift
  double accepted_mean = 0.0;
  double accepted_std = 0.0;
  double dominance_fraction = 0.0;
};

/// n_runs independent runs with seeds derived from the base seed; runs are
/// executed in parallel and aggregated in run order.
BatchSummary run_batch(const SimConfig& config, int n_runs);

namespace reference {
BatchSummary run_batch(const SimConfig& config, int n_runs);
}

} // namespace pgreserve
