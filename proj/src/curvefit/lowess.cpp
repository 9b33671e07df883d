#include <algorithm>
#include <cmath>

#include "lowess_common.hpp"

namespace pgreserve {

namespace {

struct Window
{
  double h;
  std::size_t lo, hi;   // points with |x - x0| < h
};

// Radius of the k nearest points around x0, widened until at least
// `need_distinct` distinct x values carry positive weight.
Window neighbourhood(const lowess::Prepared& p, double x0, std::size_t k, int need_distinct)
{
  const std::size_t n = p.x.size();
  for (;;) {
    // Two-pointer expansion over the sorted x values.
    std::size_t left = static_cast<std::size_t>(
      std::lower_bound(p.x.begin(), p.x.end(), x0) - p.x.begin());
    std::size_t right = left;   // chosen = [left, right)
    double h = 0.0;
    for (std::size_t taken = 0; taken < k; ++taken) {
      const double dl = left > 0 ? x0 - p.x[left - 1] : HUGE_VAL;
      const double dr = right < n ? p.x[right] - x0 : HUGE_VAL;
      if (dl <= dr) {
        h = std::max(h, dl);
        --left;
      } else {
        h = std::max(h, dr);
        ++right;
      }
    }
    // Strictly inside the radius.
    std::size_t lo = left, hi = right;
    while (lo < hi && x0 - p.x[lo] >= h)
      ++lo;
    while (hi > lo && p.x[hi - 1] - x0 >= h)
      --hi;

    int distinct = 0;
    for (std::size_t j = lo; j < hi; ++j)
      if (j == lo || p.x[j] != p.x[j - 1])
        ++distinct;
    if (distinct >= need_distinct || k >= n)
      return {h, lo, hi};
    ++k;
  }
}

} // namespace

FittedCurve fit_rlwr(std::span<const CurvePoint> points, const RlwrOptions& options)
{
  const auto prep = lowess::prepare(points, options);
  const std::size_t m = prep.unique_x.size();
  std::vector<Window> windows(m);
  const auto mi = static_cast<std::ptrdiff_t>(m);

#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t u = 0; u < mi; ++u)
    windows[static_cast<std::size_t>(u)] =
      neighbourhood(prep, prep.unique_x[static_cast<std::size_t>(u)], prep.span, options.degree + 1);

  std::vector<double> robust(prep.x.size(), 1.0);
  std::vector<double> fitted(m, 0.0);
  for (int iter = 0; iter <= options.robustness_iters; ++iter) {
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t u = 0; u < mi; ++u) {
      const auto ui = static_cast<std::size_t>(u);
      const auto& w = windows[ui];
      auto v = lowess::local_fit(prep, robust, prep.unique_x[ui], w.h, w.lo, w.hi,
                                 options.degree);
      // With all weights zero the previous pass's value stands.
      if (v)
        fitted[ui] = *v;
    }
    if (iter == options.robustness_iters || !lowess::update_robustness(prep, fitted, robust))
      break;
  }
  return FittedCurve(prep.unique_x, fitted);
}

} // namespace pgreserve
