#include <algorithm>
#include <cmath>

#include "../curvefit/lowess_common.hpp"

namespace pgreserve::reference {

// Brute-force neighbourhoods: the radius is the k-th smallest distance over
// all points, and every local sum runs over the whole sorted sample.
FittedCurve fit_rlwr(std::span<const CurvePoint> points, const RlwrOptions& options)
{
  const auto prep = lowess::prepare(points, options);
  const std::size_t n = prep.x.size();
  const std::size_t m = prep.unique_x.size();

  std::vector<double> radius(m);
  for (std::size_t u = 0; u < m; ++u) {
    const double x0 = prep.unique_x[u];
    std::vector<double> d(n);
    for (std::size_t j = 0; j < n; ++j)
      d[j] = std::abs(prep.x[j] - x0);
    std::vector<double> sorted_d = d;
    std::sort(sorted_d.begin(), sorted_d.end());
    for (std::size_t k = prep.span; k <= n; ++k) {
      const double h = sorted_d[k - 1];
      std::vector<double> inside;
      for (std::size_t j = 0; j < n; ++j)
        if (d[j] < h)
          inside.push_back(prep.x[j]);
      inside.erase(std::unique(inside.begin(), inside.end()), inside.end());
      radius[u] = h;
      if (static_cast<int>(inside.size()) >= options.degree + 1)
        break;
    }
  }

  std::vector<double> robust(n, 1.0);
  std::vector<double> fitted(m, 0.0);
  for (int iter = 0; iter <= options.robustness_iters; ++iter) {
    for (std::size_t u = 0; u < m; ++u) {
      auto v = lowess::local_fit(prep, robust, prep.unique_x[u], radius[u], 0, n, options.degree);
      if (v)
        fitted[u] = *v;
    }
    if (iter == options.robustness_iters || !lowess::update_robustness(prep, fitted, robust))
      break;
  }
  return FittedCurve(prep.unique_x, fitted);
}

} // namespace pgreserve::reference
