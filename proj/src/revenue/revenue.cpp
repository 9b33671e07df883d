#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "pgreserve/error.hpp"
#include "pgreserve/revenue.hpp"

namespace pgreserve {

double rtb_revenue(const MarketForecast& forecast, const AuctionCurves& curves)
{
  forecast.validate();
  const auto S = static_cast<double>(forecast.supply);
  return S * curves.phi(forecast.demand / S);
}

std::optional<double> residual_competition(const MarketForecast& forecast, std::int64_t n)
{
  if (n < 0 || n > forecast.supply)
    throw ValidationError("pre-sold count must lie in [0, S]");
  if (n == forecast.supply)
    return std::nullopt;
  const double left = static_cast<double>(forecast.supply - n);
  return std::max((forecast.demand - static_cast<double>(n)) / left, 0.0);
}

double combined_revenue(std::span<const Contract> contracts, const MarketForecast& forecast,
                        const AuctionCurves& curves, const RiskParams& risk)
{
  forecast.validate();
  risk.validate();
  const auto n = static_cast<std::int64_t>(contracts.size());
  if (n > forecast.supply)
    throw ValidationError("more contracts than forecast supply");

  double guaranteed = 0.0;
  for (const auto& c : contracts)
    guaranteed += c.price * risk.retention();
  const auto xi_star = residual_competition(forecast, n);
  const double auctioned =
    xi_star ? static_cast<double>(forecast.supply - n) * curves.phi(*xi_star) : 0.0;
  return guaranteed + auctioned;
}

GuaranteeCheck guarantee_check(const MarketForecast& forecast, const AuctionCurves& curves,
                               double lambda)
{
  forecast.validate();
  GuaranteeCheck out;
  if (lambda < 0.0)
    throw ValidationError("lambda must be non-negative");
  if (lambda == 0.0) {
    out.reason = "lambda = 0: dominance holds unconditionally";
    return out;
  }

  const auto S = forecast.supply;
  const double Q = forecast.demand;
  // Grid 1, 1.5, 2, ..., S.
  const std::int64_t n = 2 * S - 1;
  std::vector<double> z(static_cast<std::size_t>(n));
  std::vector<double> capped(static_cast<std::size_t>(n));
  std::vector<char> binds(static_cast<std::size_t>(n), 0);

#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t i = 0; i < n; ++i) {
    const double v = 1.0 + 0.5 * static_cast<double>(i);
    const double xi = std::max((Q - static_cast<double>(S) + v) / v, 0.0);
    const auto m = curves.at(xi);
    const auto k = static_cast<std::size_t>(i);
    z[k] = v * m.payment_std;
    const double excess = std::min(lambda * m.payment_std, m.winning_mean - m.payment_mean);
    capped[k] = v * excess;
    binds[k] = lambda * m.payment_std > m.winning_mean - m.payment_mean;
  }

  double scale = rtb_revenue(forecast, curves);
  if (!(scale > 0.0)) {
    scale = 0.0;
    for (double x : z)
      scale = std::max(scale, std::abs(x));
    if (!(scale > 0.0))
      scale = 1.0;
  }
  out.tolerance = 1e-9 * scale;
  out.cap_binds = std::any_of(binds.begin(), binds.end(), [](char b) { return b != 0; });

  out.min_difference = HUGE_VAL;
  out.capped_min_difference = HUGE_VAL;
  for (std::int64_t i = 0; i + 1 < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const double v = 1.0 + 0.5 * static_cast<double>(i);
    const double dz = z[k + 1] - z[k];
    if (dz < out.min_difference) {
      out.min_difference = dz;
      out.at = v;
    }
    const double dc = capped[k + 1] - capped[k];
    if (dc < out.capped_min_difference) {
      out.capped_min_difference = dc;
      out.capped_at = v;
    }
  }
  if (n < 2) {
    out.min_difference = 0.0;
    out.capped_min_difference = 0.0;
  }

  const bool z_ok = out.min_difference >= -out.tolerance;
  // When the cap never binds the capped excess is lambda * z, so its
  // monotonicity is already decided by z.
  const bool capped_ok = !out.cap_binds || out.capped_min_difference >= -out.tolerance;
  out.holds = z_ok && capped_ok;

  std::ostringstream why;
  if (!z_ok)
    why << "z decreases by " << -out.min_difference << " after v=" << out.at;
  else if (!capped_ok)
    why << "pi cap binds and the capped excess decreases by " << -out.capped_min_difference
        << " after v=" << out.capped_at;
  else
    why << "z non-decreasing on the grid (min difference " << out.min_difference << ")";
  out.reason = why.str();
  return out;
}

bool RevenueReport::dominates() const
{
  return r_pg_rtb >= r_rtb - 1e-9 * std::abs(r_rtb);
}

RevenueReport revenue_report(std::span<const Contract> contracts, const MarketForecast& forecast,
                             const AuctionCurves& curves, const RiskParams& risk,
                             const GuaranteeCheck& guarantee)
{
  RevenueReport r;
  r.r_rtb = rtb_revenue(forecast, curves);
  r.n_accepted = static_cast<std::int64_t>(contracts.size());
  r.r_pg_rtb = r.n_accepted == 0 ? r.r_rtb : combined_revenue(contracts, forecast, curves, risk);
  if (r.r_rtb > 0.0)
    r.uplift = (r.r_pg_rtb - r.r_rtb) / r.r_rtb;
  r.xi_star = residual_competition(forecast, r.n_accepted);
  r.guarantee_holds = guarantee.holds;
  r.guarantee_reason = guarantee.reason;
  return r;
}

} // namespace pgreserve
