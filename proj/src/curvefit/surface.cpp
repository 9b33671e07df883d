#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <Eigen/Dense>

#include "pgreserve/error.hpp"
#include "pgreserve/surface.hpp"

namespace pgreserve {

namespace {

AxisScale scale_of(std::span<const SurfacePoint> data, double SurfacePoint::*field)
{
  AxisScale s{data.front().*field, data.front().*field};
  for (const auto& pt : data) {
    s.min = std::min(s.min, pt.*field);
    s.max = std::max(s.max, pt.*field);
  }
  return s;
}

void check_finite(std::span<const SurfacePoint> data)
{
  for (const auto& pt : data)
    if (!std::isfinite(pt.day) || !std::isfinite(pt.hour) || !std::isfinite(pt.value))
      throw DataError("surface data contains a non-finite value");
}

double tricube(double r)
{
  if (r >= 1.0)
    return 0.0;
  const double t = 1.0 - r * r * r;
  return t * t * t;
}

double pnr_value(const PnrModel& m, double u, double w)
{
  double sum = 0.0;
  double ui = 1.0;
  for (int i = 0; i <= m.p; ++i) {
    double wj = 1.0;
    for (int j = 0; j <= m.q; ++j) {
      sum += m.coefficients[static_cast<std::size_t>(i * (m.q + 1) + j)] * ui * wj;
      wj *= w;
    }
    ui *= u;
  }
  return sum;
}

} // namespace

std::string SurfaceModel::name() const
{
  std::ostringstream os;
  if (auto* p = std::get_if<PnrModel>(&fit))
    os << "PNR(" << p->p << "," << p->q << ")";
  else
    os << "LQR(" << std::get<LqrModel>(fit).bandwidth << ")";
  return os.str();
}

SurfaceModel fit_pnr(std::span<const SurfacePoint> data, int p, int q)
{
  if (p < 1 || p > 5 || q < 1 || q > 5)
    throw ValidationError("PNR degrees must lie in [1, 5]");
  const auto n_coef = static_cast<std::size_t>((p + 1) * (q + 1));
  if (data.size() < n_coef)
    throw DataError("PNR(" + std::to_string(p) + "," + std::to_string(q) + ") needs at least " +
                    std::to_string(n_coef) + " points");
  check_finite(data);

  SurfaceModel model;
  model.day_scale = scale_of(data, &SurfacePoint::day);
  model.hour_scale = scale_of(data, &SurfacePoint::hour);

  const auto rows = static_cast<Eigen::Index>(data.size());
  Eigen::MatrixXd design(rows, static_cast<Eigen::Index>(n_coef));
  Eigen::VectorXd target(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& pt = data[static_cast<std::size_t>(r)];
    const double u = model.day_scale.to_symmetric(pt.day);
    const double w = model.hour_scale.to_symmetric(pt.hour);
    double ui = 1.0;
    for (int i = 0; i <= p; ++i) {
      double wj = 1.0;
      for (int j = 0; j <= q; ++j) {
        design(r, i * (q + 1) + j) = ui * wj;
        wj *= w;
      }
      ui *= u;
    }
    target(r) = pt.value;
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(1e-10);
  if (qr.rank() < static_cast<Eigen::Index>(n_coef))
    throw DataError("PNR(" + std::to_string(p) + "," + std::to_string(q) +
                    ") design matrix is rank deficient (too few distinct days or hours)");
  const Eigen::VectorXd coef = qr.solve(target);

  PnrModel pnr{p, q, std::vector<double>(coef.data(), coef.data() + coef.size())};
  model.fit = std::move(pnr);
  return model;
}

SurfaceModel fit_lqr(std::span<const SurfacePoint> data, double bandwidth)
{
  if (!(bandwidth > 0.0 && bandwidth <= 1.0))
    throw ValidationError("LQR bandwidth fraction must lie in (0, 1]");
  if (data.empty())
    throw DataError("LQR needs training data");
  check_finite(data);
  const auto k = static_cast<std::size_t>(std::ceil(bandwidth * static_cast<double>(data.size())));
  if (k < 6)
    throw DataError("LQR neighbourhood holds " + std::to_string(k) +
                    " points; a local quadratic needs 6");

  SurfaceModel model;
  model.day_scale = scale_of(data, &SurfacePoint::day);
  model.hour_scale = scale_of(data, &SurfacePoint::hour);
  model.fit = LqrModel{bandwidth, std::vector<SurfacePoint>(data.begin(), data.end()), 0};

  int fallbacks = 0;
  for (const auto& pt : data)
    if (lqr_evaluate(model, pt.day, pt.hour).fallback)
      ++fallbacks;
  std::get<LqrModel>(model.fit).fallback_count = fallbacks;
  return model;
}

LocalEstimate lqr_evaluate(const SurfaceModel& model, double day, double hour)
{
  const auto& lqr = std::get<LqrModel>(model.fit);
  const auto& pts = lqr.points;
  const std::size_t n = pts.size();
  const auto k = std::min(
    n, static_cast<std::size_t>(std::ceil(lqr.bandwidth * static_cast<double>(n))));

  const double u0 = model.day_scale.to_unit(day);
  const double w0 = model.hour_scale.to_unit(hour);
  std::vector<double> dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double du = model.day_scale.to_unit(pts[i].day) - u0;
    const double dw = model.hour_scale.to_unit(pts[i].hour) - w0;
    dist[i] = std::hypot(du, dw);
  }
  std::vector<double> sorted = dist;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k - 1),
                   sorted.end());
  const double h = sorted[k - 1];

  std::vector<std::size_t> active;
  std::vector<double> weight;
  for (std::size_t i = 0; i < n; ++i) {
    const double wt = h > 0.0 ? tricube(dist[i] / h) : (dist[i] == 0.0 ? 1.0 : 0.0);
    if (wt > 0.0) {
      active.push_back(i);
      weight.push_back(wt);
    }
  }

  LocalEstimate out;
  double wsum = 0.0, wy = 0.0;
  for (std::size_t a = 0; a < active.size(); ++a) {
    wsum += weight[a];
    wy += weight[a] * pts[active[a]].value;
  }
  const double weighted_mean = wsum > 0.0 ? wy / wsum : 0.0;

  if (active.size() < 6) {
    out.value = weighted_mean;
    out.fallback = true;
    return out;
  }

  const auto m = static_cast<Eigen::Index>(active.size());
  Eigen::MatrixXd design(m, 6);
  Eigen::VectorXd target(m);
  for (Eigen::Index r = 0; r < m; ++r) {
    const auto& pt = pts[active[static_cast<std::size_t>(r)]];
    const double sw = std::sqrt(weight[static_cast<std::size_t>(r)]);
    const double du = model.day_scale.to_unit(pt.day) - u0;
    const double dw = model.hour_scale.to_unit(pt.hour) - w0;
    design.row(r) << sw, sw * du, sw * dw, sw * du * du, sw * du * dw, sw * dw * dw;
    target(r) = sw * pt.value;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(1e-10);
  if (qr.rank() < 6) {
    out.value = weighted_mean;
    out.fallback = true;
    return out;
  }
  const Eigen::VectorXd coef = qr.solve(target);
  out.value = coef(0);
  return out;
}

double predict(const SurfaceModel& model, double day, double hour)
{
  double value;
  if (auto* pnr = std::get_if<PnrModel>(&model.fit))
    value = pnr_value(*pnr, model.day_scale.to_symmetric(day),
                      model.hour_scale.to_symmetric(hour));
  else
    value = lqr_evaluate(model, day, hour).value;
  if (model.nonnegative && value < 0.0)
    value = 0.0;
  return value;
}

std::vector<double> predict_all(const SurfaceModel& model, std::span<const SurfacePoint> queries)
{
  std::vector<double> out(queries.size());
  const auto n = static_cast<std::ptrdiff_t>(queries.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto& q = queries[static_cast<std::size_t>(i)];
    out[static_cast<std::size_t>(i)] = predict(model, q.day, q.hour);
  }
  return out;
}

L2Evaluation l2_eval(const SurfaceModel& model, std::span<const SurfacePoint> holdout)
{
  if (holdout.empty())
    throw ValidationError("l2_eval needs a non-empty holdout set");

  const auto predictions = predict_all(model, holdout);
  struct DayNorms
  {
    double err2 = 0.0;
    double act2 = 0.0;
  };
  std::map<double, DayNorms> days;
  for (std::size_t i = 0; i < holdout.size(); ++i) {
    auto& d = days[holdout[i].day];
    const double e = predictions[i] - holdout[i].value;
    d.err2 += e * e;
    d.act2 += holdout[i].value * holdout[i].value;
  }

  L2Evaluation out;
  std::vector<double> rel;
  for (const auto& [day, norms] : days) {
    if (norms.act2 <= 0.0) {
      out.skipped_days.push_back(day);
      continue;
    }
    rel.push_back(std::sqrt(norms.err2 / norms.act2));
  }
  out.days_used = static_cast<int>(rel.size());
  if (rel.empty())
    return out;
  double mean = 0.0;
  for (double r : rel)
    mean += r;
  mean /= static_cast<double>(rel.size());
  double ss = 0.0;
  for (double r : rel)
    ss += (r - mean) * (r - mean);
  out.l2_avg = mean;
  out.l2_std = rel.size() > 1 ? std::sqrt(ss / static_cast<double>(rel.size() - 1)) : 0.0;
  return out;
}

} // namespace pgreserve
