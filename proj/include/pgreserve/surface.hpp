#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

namespace pgreserve {

/// One hourly observation on the (day, hour) grid.
struct SurfacePoint
{
  double day = 0.0;
  double hour = 0.0;
  double value = 0.0;
};

/// Affine map of one input onto [lo_target, hi_target].
struct AxisScale
{
  double min = 0.0;
  double max = 1.0;

  double to_unit(double x) const { return max > min ? (x - min) / (max - min) : 0.0; }
  double to_symmetric(double x) const { return 2.0 * to_unit(x) - 1.0; }
};

/// Tensor-product polynomial surface, day degree p and hour degree q.
/// coefficients[i * (q + 1) + j] multiplies u^i * w^j, with u and w the day
/// and hour scaled to [-1, 1].
struct PnrModel
{
  int p = 1;
  int q = 1;
  std::vector<double> coefficients;
};

/// Local quadratic (loess-style) surface. Keeps its training points; each
/// prediction solves its own tricube-weighted least-squares problem.
struct LqrModel
{
  double bandwidth = 0.3;
  std::vector<SurfacePoint> points;
  int fallback_count = 0;   // training points where the local fit was rank deficient
};

struct SurfaceModel
{
  std::variant<PnrModel, LqrModel> fit;
  AxisScale day_scale;
  AxisScale hour_scale;
  bool nonnegative = true;   // floor predictions at zero (counts)

  std::string name() const;
};

SurfaceModel fit_pnr(std::span<const SurfacePoint> data, int p, int q);
SurfaceModel fit_lqr(std::span<const SurfacePoint> data, double bandwidth);

/// Value of the local fit at one query, with the rank-deficiency fallback flagged.
struct LocalEstimate
{
  double value = 0.0;
  bool fallback = false;
};

LocalEstimate lqr_evaluate(const SurfaceModel& model, double day, double hour);

double predict(const SurfaceModel& model, double day, double hour);

/// Predictions at many queries; local models are evaluated in parallel.
std::vector<double> predict_all(const SurfaceModel& model, std::span<const SurfacePoint> queries);

struct L2Evaluation
{
  double l2_avg = 0.0;
  double l2_std = 0.0;
  int days_used = 0;
  std::vector<double> skipped_days;   // days whose actuals are all zero
};

/// Per-day relative L2 error ||prediction - actual|| / ||actual||, averaged
/// over the holdout days (sample standard deviation across days).
L2Evaluation l2_eval(const SurfaceModel& model, std::span<const SurfacePoint> holdout);

namespace reference {
std::vector<double> predict_all(const SurfaceModel& model, std::span<const SurfacePoint> queries);
}

} // namespace pgreserve
