#include <algorithm>
#include <cmath>
#include <string>

#include "pgreserve/error.hpp"
#include "pgreserve/pricing.hpp"

namespace pgreserve {

void MarketForecast::validate() const
{
  if (supply <= 0)
    throw ValidationError("forecast supply S must be positive");
  if (!(std::isfinite(demand) && demand >= 0.0))
    throw ValidationError("forecast demand Q must be finite and non-negative");
  if (!(std::isfinite(sale_end) && sale_end > 0.0 && delivery_end > sale_end &&
        std::isfinite(delivery_end)))
    throw ValidationError("horizons must satisfy 0 < T < delivery end");
}

void RiskParams::validate() const
{
  if (!(std::isfinite(gamma) && gamma >= 0.0))
    throw ValidationError("penalty multiplier gamma must be >= 0");
  if (!(omega >= 0.0 && omega <= 1.0))
    throw ValidationError("non-delivery probability omega must lie in [0, 1]");
  if (!(std::isfinite(lambda) && lambda >= 0.0))
    throw ValidationError("risk aversion lambda must be >= 0");
  if (!(gamma * omega < 1.0))
    throw ValidationError("gamma * omega must be below 1");
}

double competition_level(const MarketForecast& forecast, std::int64_t s)
{
  if (s < 1 || s > forecast.supply)
    throw ValidationError("competition level needs 1 <= s <= S, got s=" + std::to_string(s));
  const auto S = static_cast<double>(forecast.supply);
  if (s == forecast.supply)
    return std::max(forecast.demand / S, 0.0);
  return std::max((forecast.demand - S) / static_cast<double>(s) + 1.0, 0.0);
}

namespace {

double value_from(std::int64_t s, const OrderStatMoments& m, double lambda)
{
  const double adjusted = m.payment_mean + lambda * m.payment_std;
  const double per_impression = m.winning_mean >= adjusted ? adjusted : m.winning_mean;
  return static_cast<double>(s) * per_impression;
}

} // namespace

double terminal_value(std::int64_t s, const MarketForecast& forecast, const AuctionCurves& curves,
                      const RiskParams& risk)
{
  if (s < 0 || s > forecast.supply)
    throw ValidationError("terminal value needs 0 <= s <= S");
  if (s == 0)
    return 0.0;
  return value_from(s, curves.at(competition_level(forecast, s)), risk.lambda);
}

double reserve_price(std::int64_t s, const MarketForecast& forecast, const AuctionCurves& curves,
                     const RiskParams& risk)
{
  risk.validate();
  if (s < 1 || s > forecast.supply)
    throw ValidationError("reserve price needs 1 <= s <= S");
  const double upper = terminal_value(s, forecast, curves, risk);
  const double lower = terminal_value(s - 1, forecast, curves, risk);
  return (upper - lower) / risk.retention();
}

std::vector<ScheduleEntry> reserve_schedule(const MarketForecast& forecast,
                                            const AuctionCurves& curves, const RiskParams& risk)
{
  forecast.validate();
  risk.validate();
  const std::int64_t S = forecast.supply;
  std::vector<ScheduleEntry> entries(static_cast<std::size_t>(S));

#pragma omp parallel for schedule(dynamic, 8)
  for (std::int64_t s = 1; s <= S; ++s) {
    auto& e = entries[static_cast<std::size_t>(s - 1)];
    e.s = s;
    e.xi = competition_level(forecast, s);
    e.moments = curves.at(e.xi);
    e.value = value_from(s, e.moments, risk.lambda);
  }

  double previous = 0.0;   // V(0)
  for (auto& e : entries) {
    e.reserve = (e.value - previous) / risk.retention();
    previous = e.value;
  }
  return entries;
}

namespace reference {

std::vector<ScheduleEntry> reserve_schedule(const MarketForecast& forecast,
                                            const AuctionCurves& curves, const RiskParams& risk)
{
  forecast.validate();
  std::vector<ScheduleEntry> entries;
  for (std::int64_t s = 1; s <= forecast.supply; ++s) {
    ScheduleEntry e;
    e.s = s;
    e.xi = competition_level(forecast, s);
    e.moments = curves.at(e.xi);
    e.value = terminal_value(s, forecast, curves, risk);
    e.reserve = reserve_price(s, forecast, curves, risk);
    entries.push_back(e);
  }
  return entries;
}

} // namespace reference

InventoryState::InventoryState(std::int64_t supply, double start_time)
  : supply_(supply)
  , remaining_(supply)
  , time_(start_time)
{
  if (supply < 0)
    throw ValidationError("inventory supply must be non-negative");
}

void InventoryState::advance_to(double t)
{
  if (!(t >= time_))
    throw ValidationError("request arrived out of time order");
  time_ = t;
}

void InventoryState::sell(double t, double price)
{
  advance_to(t);
  if (remaining_ == 0)
    throw ValidationError("cannot sell from an empty inventory");
  --remaining_;
  accepted_.push_back({t, price});
}

namespace {

void check_request(const InventoryState& state, const BuyRequest& request,
                   const MarketForecast& forecast)
{
  if (!std::isfinite(request.price) || request.price < 0.0)
    throw ValidationError("request price must be finite and non-negative");
  if (!(request.time >= state.time()))
    throw ValidationError("request arrived out of time order");
  if (!(request.time <= forecast.sale_end))
    throw ValidationError("request arrived after the guaranteed-sale horizon");
  if (state.supply() != forecast.supply)
    throw ValidationError("inventory supply does not match the forecast");
}

Decision apply(InventoryState& state, const BuyRequest& request, double reserve)
{
  Decision d;
  d.reserve = reserve;
  d.accepted = request.price >= reserve;
  if (d.accepted)
    state.sell(request.time, request.price);
  else
    state.advance_to(request.time);
  d.remaining = state.remaining();
  return d;
}

} // namespace

Decision decide(InventoryState& state, const BuyRequest& request, const MarketForecast& forecast,
                const AuctionCurves& curves, const RiskParams& risk)
{
  check_request(state, request, forecast);
  if (state.remaining() == 0) {
    state.advance_to(request.time);
    return Decision{false, std::numeric_limits<double>::infinity(), 0};
  }
  return apply(state, request, reserve_price(state.remaining(), forecast, curves, risk));
}

DecisionEngine::DecisionEngine(MarketForecast forecast, AuctionCurves curves, RiskParams risk)
  : forecast_(forecast)
  , curves_(std::move(curves))
  , risk_(risk)
  , schedule_(reserve_schedule(forecast_, curves_, risk_))
{
}

double DecisionEngine::reserve(std::int64_t s) const
{
  if (s < 1 || s > forecast_.supply)
    throw ValidationError("reserve lookup needs 1 <= s <= S");
  return schedule_[static_cast<std::size_t>(s - 1)].reserve;
}

double DecisionEngine::value(std::int64_t s) const
{
  if (s < 0 || s > forecast_.supply)
    throw ValidationError("value lookup needs 0 <= s <= S");
  return s == 0 ? 0.0 : schedule_[static_cast<std::size_t>(s - 1)].value;
}

Decision DecisionEngine::decide(InventoryState& state, const BuyRequest& request) const
{
  check_request(state, request, forecast_);
  if (state.remaining() == 0) {
    state.advance_to(request.time);
    return Decision{false, std::numeric_limits<double>::infinity(), 0};
  }
  return apply(state, request, reserve(state.remaining()));
}

double bellman_value(int steps, std::int64_t s, const AcceptProbability& accept_prob,
                     const MarketForecast& forecast, const AuctionCurves& curves,
                     const RiskParams& risk)
{
  if (steps < 1)
    throw ValidationError("bellman_value needs at least one step");
  if (s < 0 || s > forecast.supply)
    throw ValidationError("bellman_value needs 0 <= s <= S");
  risk.validate();
  const double keep = risk.retention();

  // next[k] = V(t + dt, k) for k = 0..s.
  std::vector<double> next(static_cast<std::size_t>(s + 1));
  for (std::int64_t k = 0; k <= s; ++k)
    next[static_cast<std::size_t>(k)] = terminal_value(k, forecast, curves, risk);

  std::vector<double> current(next.size());
  const double dt = forecast.sale_end / steps;
  for (int step = steps - 1; step >= 0; --step) {
    const double t = step * dt;
    current[0] = next[0];
    for (std::int64_t k = 1; k <= s; ++k) {
      const auto i = static_cast<std::size_t>(k);
      const double p = accept_prob(t, k);
      if (!(p >= 0.0 && p <= 1.0))
        throw ValidationError("acceptance probability must lie in [0, 1]");
      const double r = (next[i] - next[i - 1]) / keep;
      current[i] = p * (r * keep + next[i - 1]) + (1.0 - p) * next[i];
    }
    std::swap(current, next);
  }
  return next[static_cast<std::size_t>(s)];
}

} // namespace pgreserve
