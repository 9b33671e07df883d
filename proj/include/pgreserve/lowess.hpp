#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "pgreserve/curve.hpp"
#include "pgreserve/error.hpp"
#include "pgreserve/rng.hpp"

namespace pgreserve {

struct CurvePoint
{
  double x = 0.0;
  double y = 0.0;
};

struct RlwrOptions
{
  double fraction = 0.5;
  int robustness_iters = 2;
  int degree = 1;   // 0 = local constant, 1 = local linear
};

/// Robust locally weighted regression (Cleveland's lowess). Tricube weights
/// over the nearest ceil(fraction * N) points; each robustness pass multiplies
/// them by bisquare weights of the residuals scaled by 6 * median |residual|.
/// The result has one knot per distinct x.
FittedCurve fit_rlwr(std::span<const CurvePoint> points, const RlwrOptions& options = {});

namespace reference {
FittedCurve fit_rlwr(std::span<const CurvePoint> points, const RlwrOptions& options = {});
}

/// Bootstrap sample (with replacement) of size ceil(rate * N).
template <class T>
std::vector<T> resample(std::span<const T> items, double rate, std::uint64_t seed)
{
  if (!(rate > 0.0) || !std::isfinite(rate))
    throw ValidationError("resample rate must be positive");
  std::vector<T> out;
  if (items.empty())
    return out;
  // Guard against 1.5 * 100 landing a hair above 150.
  const double target = rate * static_cast<double>(items.size());
  const auto n = static_cast<std::size_t>(std::ceil(target - 1e-9 * target));
  out.reserve(n);
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i)
    out.push_back(items[rng.below(items.size())]);
  return out;
}

/// One auction as seen in the logs, in per-impression money.
struct AuctionObservation
{
  int bidders = 1;
  double payment = 0.0;
  double winning_bid = 0.0;
};

struct CompetitionBin
{
  int xi = 0;
  std::int64_t count = 0;
  double mean_payment = 0.0;
  double std_payment = 0.0;
  double mean_winning_bid = 0.0;
};

struct CurveFitOptions
{
  RlwrOptions rlwr;
  double resample_rate = 1.0;   // 1 disables resampling
  std::uint64_t seed = 0;
};

/// Empirical phi (mean payment), psi (payment std) and pi (mean winning bid)
/// curves over the competition level.
struct EmpiricalCurves
{
  FittedCurve phi;
  FittedCurve psi;
  FittedCurve pi;
  std::vector<CompetitionBin> bins;
};

std::vector<CompetitionBin> bin_by_competition(std::span<const AuctionObservation> records);

EmpiricalCurves build_auction_curves(std::span<const AuctionObservation> records,
                                     const CurveFitOptions& options = {});

} // namespace pgreserve
