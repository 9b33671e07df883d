#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "pgreserve/auction.hpp"
#include "pgreserve/error.hpp"

namespace pgreserve {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_sf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

double normal_quantile(double p)
{
  if (!(p > 0.0 && p < 1.0))
    throw ValidationError("normal_quantile: p must lie in (0, 1)");

  // Acklam's rational approximation, then one Halley step.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  const double e = (p < 0.5) ? normal_cdf(x) - p : (1.0 - p) - normal_sf(x);
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

namespace {

constexpr double kTailProbability = 1e-10;
constexpr double kKernelReach = 8.0;

double silverman_bandwidth(const std::vector<double>& sorted)
{
  const auto n = static_cast<double>(sorted.size());
  double mean = 0.0;
  for (double x : sorted)
    mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : sorted)
    ss += (x - mean) * (x - mean);
  const double sd = sorted.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;

  auto quantile = [&sorted](double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
  };
  const double iqr = quantile(0.75) - quantile(0.25);

  double spread = sd;
  if (iqr > 0.0)
    spread = std::min(sd, iqr / 1.34);
  double h = 0.9 * spread * std::pow(n, -0.2);
  if (!(h > 0.0)) {
    // Degenerate sample: a narrow kernel around the repeated value.
    h = std::max(1e-6 * std::abs(sorted.back()), 1e-12);
  }
  return h;
}

} // namespace

BidDistribution BidDistribution::uniform(double v)
{
  if (!(std::isfinite(v) && v > 0.0))
    throw ValidationError("uniform bid distribution needs finite v > 0");
  return BidDistribution(Uniform{v});
}

BidDistribution BidDistribution::log_normal(double mu, double sigma)
{
  if (!std::isfinite(mu) || !(std::isfinite(sigma) && sigma > 0.0))
    throw ValidationError("log-normal bid distribution needs finite mu and sigma > 0");
  return BidDistribution(LogNormal{mu, sigma});
}

BidDistribution BidDistribution::empirical(std::vector<double> bids)
{
  if (bids.empty())
    throw ValidationError("empirical bid distribution needs a non-empty sample");
  for (double b : bids)
    if (!(std::isfinite(b) && b >= 0.0))
      throw ValidationError("empirical bids must be finite and non-negative");
  std::sort(bids.begin(), bids.end());
  const double h = silverman_bandwidth(bids);
  return BidDistribution(Empirical{std::move(bids), h});
}

std::string BidDistribution::describe() const
{
  std::ostringstream os;
  if (auto* u = as_uniform())
    os << "uniform(v=" << u->v << ")";
  else if (auto* l = as_log_normal())
    os << "log-normal(mu=" << l->mu << ", sigma=" << l->sigma << ")";
  else if (auto* e = as_empirical())
    os << "empirical(n=" << e->sample.size() << ", h=" << e->bandwidth << ")";
  return os.str();
}

double BidDistribution::pdf(double x) const
{
  if (auto* u = as_uniform())
    return (x >= 0.0 && x <= u->v) ? 1.0 / u->v : 0.0;
  if (auto* l = as_log_normal()) {
    if (x <= 0.0)
      return 0.0;
    const double z = (std::log(x) - l->mu) / l->sigma;
    return std::exp(-0.5 * z * z) / (x * l->sigma * std::sqrt(2.0 * std::numbers::pi));
  }
  const auto& e = std::get<Empirical>(model_);
  const double h = e.bandwidth;
  const auto first = std::lower_bound(e.sample.begin(), e.sample.end(), x - kKernelReach * h);
  const auto last = std::upper_bound(first, e.sample.end(), x + kKernelReach * h);
  double sum = 0.0;
  for (auto it = first; it != last; ++it) {
    const double z = (x - *it) / h;
    sum += std::exp(-0.5 * z * z);
  }
  return sum / (static_cast<double>(e.sample.size()) * h * std::sqrt(2.0 * std::numbers::pi));
}

double BidDistribution::cdf(double x) const
{
  if (auto* u = as_uniform())
    return std::clamp(x / u->v, 0.0, 1.0);
  if (auto* l = as_log_normal())
    return x <= 0.0 ? 0.0 : normal_cdf((std::log(x) - l->mu) / l->sigma);
  const auto& e = std::get<Empirical>(model_);
  const double h = e.bandwidth;
  const auto first = std::lower_bound(e.sample.begin(), e.sample.end(), x - kKernelReach * h);
  const auto last = std::upper_bound(first, e.sample.end(), x + kKernelReach * h);
  double sum = static_cast<double>(first - e.sample.begin());
  for (auto it = first; it != last; ++it)
    sum += normal_cdf((x - *it) / h);
  return sum / static_cast<double>(e.sample.size());
}

double BidDistribution::sf(double x) const
{
  if (auto* u = as_uniform())
    return std::clamp(1.0 - x / u->v, 0.0, 1.0);
  if (auto* l = as_log_normal())
    return x <= 0.0 ? 1.0 : normal_sf((std::log(x) - l->mu) / l->sigma);
  const auto& e = std::get<Empirical>(model_);
  const double h = e.bandwidth;
  const auto first = std::lower_bound(e.sample.begin(), e.sample.end(), x - kKernelReach * h);
  const auto last = std::upper_bound(first, e.sample.end(), x + kKernelReach * h);
  double sum = static_cast<double>(e.sample.end() - last);
  for (auto it = first; it != last; ++it)
    sum += normal_sf((x - *it) / h);
  return sum / static_cast<double>(e.sample.size());
}

double BidDistribution::lower() const
{
  if (as_uniform())
    return 0.0;
  if (auto* l = as_log_normal())
    return std::exp(l->mu + l->sigma * normal_quantile(kTailProbability));
  const auto& e = std::get<Empirical>(model_);
  return e.sample.front() - kKernelReach * e.bandwidth;
}

double BidDistribution::upper() const
{
  if (auto* u = as_uniform())
    return u->v;
  if (auto* l = as_log_normal())
    return std::exp(l->mu + l->sigma * normal_quantile(1.0 - kTailProbability));
  const auto& e = std::get<Empirical>(model_);
  return e.sample.back() + kKernelReach * e.bandwidth;
}

double BidDistribution::max_bid() const
{
  if (auto* e = as_empirical())
    return e->sample.back();
  return upper();
}

double BidDistribution::draw(Rng& rng) const
{
  if (auto* u = as_uniform())
    return u->v * rng.uniform();
  if (auto* l = as_log_normal())
    return std::exp(l->mu + l->sigma * rng.normal());
  const auto& e = std::get<Empirical>(model_);
  // Smoothed bootstrap: a resampled bid plus kernel noise.
  const double base = e.sample[rng.below(e.sample.size())];
  return base + e.bandwidth * rng.normal();
}

CompetitionLevel::CompetitionLevel(double xi)
  : xi_(xi)
{
  if (!std::isfinite(xi) || xi < 0.0)
    throw ValidationError("competition level must be finite and non-negative");
}

} // namespace pgreserve
