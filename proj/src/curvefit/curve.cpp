#include <algorithm>

#include "pgreserve/curve.hpp"
#include "pgreserve/error.hpp"

namespace pgreserve {

FittedCurve::FittedCurve(std::vector<double> xs, std::vector<double> ys)
  : xs_(std::move(xs))
  , ys_(std::move(ys))
{
  if (xs_.empty() || xs_.size() != ys_.size())
    throw ValidationError("fitted curve needs matching, non-empty knot vectors");
  for (std::size_t i = 1; i < xs_.size(); ++i)
    if (!(xs_[i] > xs_[i - 1]))
      throw ValidationError("fitted curve knots must be strictly increasing");
}

double FittedCurve::operator()(double x) const
{
  if (x <= xs_.front())
    return ys_.front();
  if (x >= xs_.back())
    return ys_.back();
  const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  const auto i = static_cast<std::size_t>(it - xs_.begin());
  const double x0 = xs_[i - 1], x1 = xs_[i];
  const double t = (x - x0) / (x1 - x0);
  return ys_[i - 1] + t * (ys_[i] - ys_[i - 1]);
}

FittedCurve FittedCurve::floored(double floor) const
{
  std::vector<double> ys = ys_;
  for (double& y : ys)
    y = std::max(y, floor);
  return FittedCurve(xs_, std::move(ys));
}

} // namespace pgreserve
