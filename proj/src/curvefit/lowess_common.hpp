#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "pgreserve/error.hpp"
#include "pgreserve/lowess.hpp"

namespace pgreserve::lowess {

/// Points sorted by x plus the distinct x values at which the curve is fitted.
struct Prepared
{
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> unique_x;
  std::vector<std::size_t> unique_of;   // point index -> index into unique_x
  std::size_t span = 0;                 // neighbourhood size ceil(fraction * N)
};

inline Prepared prepare(std::span<const CurvePoint> points, const RlwrOptions& opt)
{
  if (!(opt.fraction > 0.0 && opt.fraction <= 1.0))
    throw ValidationError("RLWR fraction must lie in (0, 1]");
  if (opt.robustness_iters < 0)
    throw ValidationError("RLWR robustness iterations must be >= 0");
  if (opt.degree < 0 || opt.degree > 1)
    throw ValidationError("RLWR degree must be 0 or 1");
  if (points.size() < 5)
    throw DataError("RLWR needs at least 5 points");

  std::vector<CurvePoint> sorted(points.begin(), points.end());
  for (const auto& p : sorted)
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
      throw DataError("RLWR input contains a non-finite value");
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const CurvePoint& a, const CurvePoint& b) { return a.x < b.x; });
  if (sorted.front().x == sorted.back().x)
    throw DataError("RLWR needs at least two distinct x values");

  Prepared p;
  for (const auto& pt : sorted) {
    if (p.unique_x.empty() || pt.x != p.unique_x.back())
      p.unique_x.push_back(pt.x);
    p.x.push_back(pt.x);
    p.y.push_back(pt.y);
    p.unique_of.push_back(p.unique_x.size() - 1);
  }
  const double n = static_cast<double>(p.x.size());
  p.span = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(opt.fraction * n)), 2,
                                   p.x.size());
  return p;
}

inline double tricube(double r)
{
  if (r >= 1.0)
    return 0.0;
  const double t = 1.0 - r * r * r;
  return t * t * t;
}

inline double bisquare(double r)
{
  if (std::abs(r) >= 1.0)
    return 0.0;
  const double t = 1.0 - r * r;
  return t * t;
}

inline double median(std::vector<double> v)
{
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    m = 0.5 * (m + lower);
  }
  return m;
}

/// Weighted local fit at x0 using points [lo, hi) of the sorted arrays with
/// neighbourhood radius h. Returns nullopt when every weight is zero.
inline std::optional<double> local_fit(const Prepared& p, std::span<const double> robust,
                                       double x0, double h, std::size_t lo, std::size_t hi,
                                       int degree)
{
  double sw = 0.0, swx = 0.0, swy = 0.0;
  for (std::size_t j = lo; j < hi; ++j) {
    const double w = tricube(std::abs(p.x[j] - x0) / h) * robust[j];
    sw += w;
    swx += w * p.x[j];
    swy += w * p.y[j];
  }
  if (!(sw > 0.0))
    return std::nullopt;
  const double xm = swx / sw;
  const double ym = swy / sw;
  if (degree == 0)
    return ym;

  double sxx = 0.0, sxy = 0.0;
  for (std::size_t j = lo; j < hi; ++j) {
    const double w = tricube(std::abs(p.x[j] - x0) / h) * robust[j];
    sxx += w * (p.x[j] - xm) * (p.x[j] - xm);
    sxy += w * (p.x[j] - xm) * (p.y[j] - ym);
  }
  const double range = p.x.back() - p.x.front();
  if (sxx <= 1e-12 * range * range * sw)
    return ym;   // one effective x value: the local line is undetermined
  return ym + sxy / sxx * (x0 - xm);
}

/// Bisquare robustness weights from residuals at every point. Returns false
/// when the residual scale is zero (the fit is already exact).
inline bool update_robustness(const Prepared& p, std::span<const double> fitted_unique,
                              std::vector<double>& robust)
{
  std::vector<double> abs_res(p.x.size());
  double ymax = 0.0;
  for (std::size_t i = 0; i < p.x.size(); ++i) {
    abs_res[i] = std::abs(p.y[i] - fitted_unique[p.unique_of[i]]);
    ymax = std::max(ymax, std::abs(p.y[i]));
  }
  const double s = median(abs_res);
  if (s <= 1e-14 * std::max(ymax, 1e-300))
    return false;
  for (std::size_t i = 0; i < p.x.size(); ++i)
    robust[i] = bisquare(abs_res[i] / (6.0 * s));
  return true;
}

} // namespace pgreserve::lowess
