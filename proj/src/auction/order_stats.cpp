#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "pgreserve/auction.hpp"
#include "pgreserve/error.hpp"
#include "pgreserve/quadrature.hpp"

namespace pgreserve {

namespace {

constexpr double kRelTol = 1e-10;
constexpr double kAbsTolScale = 1e-10;

std::vector<double> breakpoints(const BidDistribution& dist)
{
  std::vector<double> out;
  const double lo = dist.lower();
  const double hi = dist.upper();
  if (auto* l = dist.as_log_normal()) {
    static constexpr double probs[] = {1e-10, 1e-6, 1e-3, 0.01, 0.05, 0.15, 0.3, 0.5,
                                       0.7,   0.85, 0.95, 0.99, 0.999, 1 - 1e-6, 1 - 1e-10};
    out.push_back(lo);
    for (double p : probs)
      if (p > 1e-10 && p < 1 - 1e-10)
        out.push_back(std::exp(l->mu + l->sigma * normal_quantile(p)));
    out.push_back(hi);
    return out;
  }
  constexpr int pieces = 16;
  for (int i = 0; i <= pieces; ++i)
    out.push_back(lo + (hi - lo) * i / pieces);
  return out;
}

} // namespace

OrderStatMoments order_stat_moments(const BidDistribution& dist, CompetitionLevel level)
{
  const double xi = level.value();
  OrderStatMoments out;
  if (xi < 1.0)
    return out;

  const bool has_second = xi > 1.0;
  // [payment, payment^2, winning bid] weighted by the order-statistic densities.
  auto integrand = [&](double x) -> std::array<double, 3> {
    const double g = dist.pdf(x);
    const double f = dist.cdf(x);
    if (g <= 0.0 || f <= 0.0)
      return {0.0, 0.0, 0.0};
    const double first = xi * g * std::pow(f, xi - 1.0);
    double second = 0.0;
    if (has_second)
      second = xi * (xi - 1.0) * g * dist.sf(x) * std::pow(f, xi - 2.0);
    return {x * second, x * x * second, x * first};
  };

  const auto breaks = breakpoints(dist);
  const double scale = dist.max_bid();
  const auto res = quad::integrate<3>(integrand, std::span<const double>(breaks),
                                      kAbsTolScale * scale, kRelTol);
  if (!res.converged && res.error > 1e-7 * scale)
    throw NumericalError("order-statistic quadrature did not converge for " +
                         dist.describe() + " at xi=" + std::to_string(xi));

  const double cap = dist.max_bid();
  out.winning_mean = std::clamp(res.value[2], 0.0, cap);
  if (has_second) {
    const double mean = std::clamp(res.value[0], 0.0, cap);
    const double var = res.value[1] - res.value[0] * res.value[0];
    if (var < -1e-9 * std::max(res.value[1], scale * scale * 1e-12))
      throw NumericalError("negative payment variance from quadrature for " + dist.describe());
    out.payment_mean = mean;
    out.payment_std = std::sqrt(std::max(var, 0.0));
  }
  return out;
}

OrderStatMoments uniform_order_stat_moments(double v, double xi)
{
  OrderStatMoments out;
  if (xi < 1.0)
    return out;
  out.winning_mean = v * xi / (xi + 1.0);
  if (xi > 1.0) {
    out.payment_mean = v * (xi - 1.0) / (xi + 1.0);
    const double var = 2.0 * (xi - 1.0) / ((xi + 1.0) * (xi + 1.0) * (xi + 2.0));
    out.payment_std = v * std::sqrt(var);
  }
  return out;
}

double expected_second_price(const BidDistribution& dist, CompetitionLevel xi)
{
  if (xi.value() <= 1.0)
    return 0.0;
  return order_stat_moments(dist, xi).payment_mean;
}

double payment_std(const BidDistribution& dist, CompetitionLevel xi)
{
  if (xi.value() <= 1.0)
    return 0.0;
  return order_stat_moments(dist, xi).payment_std;
}

double expected_winning_bid(const BidDistribution& dist, CompetitionLevel xi)
{
  if (xi.value() < 1.0)
    return 0.0;
  return order_stat_moments(dist, xi).winning_mean;
}

} // namespace pgreserve
