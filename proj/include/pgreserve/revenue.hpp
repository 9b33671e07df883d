#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "pgreserve/pricing.hpp"

namespace pgreserve {

/// S * phi(Q / S): every impression sold in RTB.
double rtb_revenue(const MarketForecast& forecast, const AuctionCurves& curves);

/// Residual competition level (Q - n) / (S - n) once n impressions are pre-sold.
/// Empty when n = S.
std::optional<double> residual_competition(const MarketForecast& forecast, std::int64_t n);

/// Guaranteed revenue net of expected penalties plus RTB revenue of the unsold
/// remainder: sum price * (1 - gamma * omega) + (S - n) * phi(xi*).
double combined_revenue(std::span<const Contract> contracts, const MarketForecast& forecast,
                        const AuctionCurves& curves, const RiskParams& risk);

/// Evidence for the sufficient condition of the dominance result with lambda > 0.
struct GuaranteeCheck
{
  bool holds = true;
  std::string reason;
  /// Smallest forward difference of z(v) = v * psi((Q - S + v) / v) on the grid.
  double min_difference = 0.0;
  double at = 0.0;
  /// Same for the capped excess v * min(lambda * psi, pi - phi), which is what
  /// the terminal value actually adds when the pi cap binds.
  double capped_min_difference = 0.0;
  double capped_at = 0.0;
  bool cap_binds = false;
  double tolerance = 0.0;
};

/// Checks that z is non-decreasing on v in {1, 1.5, 2, ..., S} by forward
/// differences, with tolerance 1e-9 * rtb_revenue. Always holds for lambda = 0.
GuaranteeCheck guarantee_check(const MarketForecast& forecast, const AuctionCurves& curves,
                               double lambda);

struct RevenueReport
{
  double r_rtb = 0.0;
  double r_pg_rtb = 0.0;
  std::optional<double> uplift;   // (r_pg_rtb - r_rtb) / r_rtb; empty when r_rtb = 0
  std::int64_t n_accepted = 0;
  std::optional<double> xi_star;  // empty when everything was pre-sold
  bool guarantee_holds = true;
  std::string guarantee_reason;

  /// r_pg_rtb >= r_rtb up to 1e-9 relative.
  bool dominates() const;
};

RevenueReport revenue_report(std::span<const Contract> contracts, const MarketForecast& forecast,
                             const AuctionCurves& curves, const RiskParams& risk,
                             const GuaranteeCheck& guarantee);

} // namespace pgreserve
