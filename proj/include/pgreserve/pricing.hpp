#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "pgreserve/auction.hpp"
#include "pgreserve/lowess.hpp"

namespace pgreserve {

/// Expected supply (impressions) and demand (bids) of the delivery period,
/// with the end of the guaranteed-sale horizon and of delivery.
struct MarketForecast
{
  std::int64_t supply = 0;     // S
  double demand = 0.0;         // Q
  double sale_end = 1.0;       // T
  double delivery_end = 2.0;   // end of delivery, > T

  void validate() const;
};

struct RiskParams
{
  double gamma = 0.0;    // penalty multiplier on a failed delivery
  double omega = 0.0;    // probability of failing to deliver
  double lambda = 0.0;   // risk aversion

  /// Expected fraction of a guaranteed price that is kept, 1 - gamma * omega.
  double retention() const { return 1.0 - gamma * omega; }
  void validate() const;
};

/// phi (expected payment), psi (payment std) and pi (expected winning bid)
/// over the competition level. Every source is wrapped with the same
/// conventions: phi = psi = 0 for xi <= 1, pi = 0 for xi < 1, pi >= phi.
class AuctionCurves
{
public:
  using MomentFn = std::function<OrderStatMoments(double)>;

  /// Quadrature against a bid model, evaluated on demand.
  static AuctionCurves from_distribution(BidDistribution dist);
  /// Closed forms for U[0, v].
  static AuctionCurves uniform_closed_form(double v);
  static AuctionCurves from_fitted(const EmpiricalCurves& fitted);
  static AuctionCurves from_function(MomentFn fn);

  OrderStatMoments at(double xi) const;
  double phi(double xi) const { return at(xi).payment_mean; }
  double psi(double xi) const { return at(xi).payment_std; }
  double pi(double xi) const { return at(xi).winning_mean; }

  /// Every curve value multiplied by c > 0.
  AuctionCurves scaled(double c) const;

private:
  explicit AuctionCurves(MomentFn fn)
    : fn_(std::move(fn))
  {
  }
  MomentFn fn_;
};

/// Per-impression bidders left for RTB once S - s impressions are pre-sold:
/// max((Q - S) / s + 1, 0).
double competition_level(const MarketForecast& forecast, std::int64_t s);

/// Risk-adjusted RTB value of s unsold impressions at the end of the sale
/// horizon: s * (phi + lambda * psi), capped at s * pi.
double terminal_value(std::int64_t s, const MarketForecast& forecast, const AuctionCurves& curves,
                      const RiskParams& risk);

/// Hidden reserve for selling one more impression with s left:
/// (V(s) - V(s - 1)) / (1 - gamma * omega). Independent of time.
double reserve_price(std::int64_t s, const MarketForecast& forecast, const AuctionCurves& curves,
                     const RiskParams& risk);

struct ScheduleEntry
{
  std::int64_t s = 0;
  double xi = 0.0;
  OrderStatMoments moments;
  double value = 0.0;     // V(s)
  double reserve = 0.0;   // r(s)
};

/// Reserve for every inventory level s = 1..S. Terminal values are
/// evaluated in parallel.
std::vector<ScheduleEntry> reserve_schedule(const MarketForecast& forecast,
                                            const AuctionCurves& curves, const RiskParams& risk);

namespace reference {
std::vector<ScheduleEntry> reserve_schedule(const MarketForecast& forecast,
                                            const AuctionCurves& curves, const RiskParams& risk);
}

struct Contract
{
  double time = 0.0;
  double price = 0.0;   // per impression
};

struct BuyRequest
{
  double time = 0.0;
  double price = 0.0;   // proposed guaranteed price, per impression
};

/// Remaining inventory and the contracts sold so far. Mutated only by the
/// decision functions, one request at a time.
class InventoryState
{
public:
  explicit InventoryState(std::int64_t supply, double start_time = 0.0);

  std::int64_t supply() const { return supply_; }
  std::int64_t remaining() const { return remaining_; }
  double time() const { return time_; }
  const std::vector<Contract>& accepted() const { return accepted_; }

  void advance_to(double t);
  void sell(double t, double price);

private:
  std::int64_t supply_;
  std::int64_t remaining_;
  double time_;
  std::vector<Contract> accepted_;
};

struct Decision
{
  bool accepted = false;
  double reserve = std::numeric_limits<double>::infinity();   // infinite when sold out
  std::int64_t remaining = 0;                                 // after the decision
};

/// Accept iff the proposed price meets the reserve for the current inventory.
/// Computes the reserve from scratch.
Decision decide(InventoryState& state, const BuyRequest& request, const MarketForecast& forecast,
                const AuctionCurves& curves, const RiskParams& risk);

/// Same rule against a precomputed schedule.
class DecisionEngine
{
public:
  DecisionEngine(MarketForecast forecast, AuctionCurves curves, RiskParams risk);

  Decision decide(InventoryState& state, const BuyRequest& request) const;
  double reserve(std::int64_t s) const;

  const MarketForecast& forecast() const { return forecast_; }
  const AuctionCurves& curves() const { return curves_; }
  const RiskParams& risk() const { return risk_; }
  const std::vector<ScheduleEntry>& schedule() const { return schedule_; }
  /// Terminal value V(s) for s = 0..S.
  double value(std::int64_t s) const;

private:
  MarketForecast forecast_;
  AuctionCurves curves_;
  RiskParams risk_;
  std::vector<ScheduleEntry> schedule_;
};

/// Acceptance probability of a request at time t with s impressions left.
using AcceptProbability = std::function<double(double t, std::int64_t s)>;

/// Backward recursion of the value function over `steps` equal time steps,
/// starting from the terminal values and setting each step's reserve from
/// the next step's values. Used to check that V does not depend on time.
double bellman_value(int steps, std::int64_t s, const AcceptProbability& accept_prob,
                     const MarketForecast& forecast, const AuctionCurves& curves,
                     const RiskParams& risk);

} // namespace pgreserve
