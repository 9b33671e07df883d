#pragma once

#include <span>
#include <utility>
#include <vector>

namespace pgreserve {

/// Piecewise-linear curve over the competition level, clamped to the
/// boundary knot values outside the fitted range.
class FittedCurve
{
public:
  FittedCurve() = default;
  /// Knots must be strictly increasing in x.
  FittedCurve(std::vector<double> xs, std::vector<double> ys);

  double operator()(double x) const;

  std::span<const double> xs() const { return xs_; }
  std::span<const double> ys() const { return ys_; }
  std::size_t size() const { return xs_.size(); }
  bool empty() const { return xs_.empty(); }
  std::pair<double, double> range() const { return {xs_.front(), xs_.back()}; }

  /// Copy with every knot value raised to at least `floor`.
  FittedCurve floored(double floor) const;

private:
  std::vector<double> xs_;
  std::vector<double> ys_;
};

} // namespace pgreserve
