#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "pgreserve/error.hpp"
#include "pgreserve/rng.hpp"
#include "pgreserve/surface.hpp"

using namespace pgreserve;

namespace {

template <class F>
std::vector<SurfacePoint> grid(int days, F f, int first_day = 0)
{
  std::vector<SurfacePoint> out;
  for (int d = first_day; d < first_day + days; ++d)
    for (int h = 0; h < 24; ++h)
      out.push_back({double(d), double(h), f(double(d), double(h))});
  return out;
}

// Independent least-squares oracle: raw monomials, normal equations, Gaussian
// elimination with partial pivoting.
std::vector<double> normal_equation_fit(const std::vector<SurfacePoint>& data, int p, int q)
{
  const int m = (p + 1) * (q + 1);
  std::vector<std::vector<double>> a(m, std::vector<double>(m + 1, 0.0));
  for (const auto& pt : data) {
    std::vector<double> row;
    for (int i = 0; i <= p; ++i)
      for (int j = 0; j <= q; ++j)
        row.push_back(std::pow(pt.day, i) * std::pow(pt.hour, j));
    for (int r = 0; r < m; ++r) {
      for (int c = 0; c < m; ++c)
        a[r][c] += row[r] * row[c];
      a[r][m] += row[r] * pt.value;
    }
  }
  for (int c = 0; c < m; ++c) {
    int piv = c;
    for (int r = c + 1; r < m; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c]))
        piv = r;
    std::swap(a[c], a[piv]);
    for (int r = 0; r < m; ++r) {
      if (r == c)
        continue;
      const double f = a[r][c] / a[c][c];
      for (int k = c; k <= m; ++k)
        a[r][k] -= f * a[c][k];
    }
  }
  std::vector<double> coef(m);
  for (int r = 0; r < m; ++r)
    coef[r] = a[r][m] / a[r][r];
  return coef;
}

double sse(const SurfaceModel& m, const std::vector<SurfacePoint>& data)
{
  double s = 0.0;
  for (const auto& pt : data) {
    const double e = predict(m, pt.day, pt.hour) - pt.value;
    s += e * e;
  }
  return s;
}

} // namespace

TEST_CASE("PNR recovers exact polynomials")
{
  auto data = grid(7, [](double d, double h) { return 2.0 + 3.0 * d + 4.0 * h; });
  auto m = fit_pnr(data, 1, 1);
  CHECK(m.name() == "PNR(1,1)");
  for (const auto& pt : data)
    CHECK(std::abs(predict(m, pt.day, pt.hour) - pt.value) < 1e-8);
  // Extrapolation to the next day stays exact for a linear surface.
  CHECK(std::abs(predict(m, 7.0, 5.0) - (2.0 + 21.0 + 20.0)) < 1e-8);

  for (int p = 1; p <= 5; ++p)
    for (int q = 1; q <= 5; ++q) {
      auto c = fit_pnr(grid(7, [](double, double) { return 7.0; }), p, q);
      CHECK(std::abs(predict(c, 3.0, 11.0) - 7.0) < 1e-8);
    }

  auto cubic = grid(6, [](double d, double h) { return 1.0 + d * d * h - 0.01 * h * h * h; });
  auto mc = fit_pnr(cubic, 2, 3);
  mc.nonnegative = false;
  for (const auto& pt : cubic)
    CHECK(std::abs(predict(mc, pt.day, pt.hour) - pt.value) < 1e-8);
}

TEST_CASE("PNR on noisy data matches an independent normal-equations solve")
{
  Rng rng(17);
  auto data = grid(7, [&](double d, double h) { return d * d * h + rng.normal(0.0, 0.1); });
  auto m = fit_pnr(data, 2, 1);
  m.nonnegative = false;   // signed target
  const double rmse = std::sqrt(sse(m, data) / double(data.size()));
  CHECK(rmse <= 0.15);

  const auto coef = normal_equation_fit(data, 2, 1);
  for (const auto& pt : data) {
    double oracle = 0.0;
    int k = 0;
    for (int i = 0; i <= 2; ++i)
      for (int j = 0; j <= 1; ++j)
        oracle += coef[k++] * std::pow(pt.day, i) * std::pow(pt.hour, j);
    CHECK(predict(m, pt.day, pt.hour) == doctest::Approx(oracle).epsilon(1e-8));
  }

  // Optimal in its basis: no single-coefficient perturbation lowers SSE.
  const double base = sse(m, data);
  auto& pnr = std::get<PnrModel>(m.fit);
  for (std::size_t c = 0; c < pnr.coefficients.size(); ++c)
    for (double delta : {-1e-3, 1e-3}) {
      SurfaceModel moved = m;
      std::get<PnrModel>(moved.fit).coefficients[c] += delta;
      CHECK(sse(moved, data) >= base);
    }
}

TEST_CASE("PNR input validation")
{
  auto data = grid(3, [](double d, double h) { return d + h; });
  CHECK_THROWS_AS(fit_pnr(data, 0, 1), ValidationError);
  CHECK_THROWS_AS(fit_pnr(data, 1, 6), ValidationError);
  // Three days cannot pin a day-degree-3 polynomial.
  CHECK_THROWS_AS(fit_pnr(data, 3, 1), DataError);
  std::vector<SurfacePoint> one_hour;
  for (int d = 0; d < 10; ++d)
    one_hour.push_back({double(d), 5.0, double(d)});
  CHECK_THROWS_AS(fit_pnr(one_hour, 1, 1), DataError);
}

TEST_CASE("LQR reproduces quadratics and constants")
{
  auto quad = [](double d, double h) { return 1.0 + 0.5 * d - 0.2 * h + 0.3 * d * d + 0.05 * d * h - 0.01 * h * h; };
  auto data = grid(7, quad);
  auto m = fit_lqr(data, 0.3);
  m.nonnegative = false;
  CHECK(std::get<LqrModel>(m.fit).fallback_count == 0);
  for (double d : {1.0, 2.5, 3.0, 5.0})
    for (double h : {3.0, 7.5, 12.0, 20.0})
      CHECK(std::abs(predict(m, d, h) - quad(d, h)) < 1e-6);

  auto c = fit_lqr(grid(7, [](double, double) { return 4.0; }), 0.25);
  for (double d : {0.0, 3.0, 6.0})
    for (double h : {0.0, 12.0, 23.0})
      CHECK(std::abs(predict(c, d, h) - 4.0) < 1e-9);

  CHECK_THROWS_AS(fit_lqr(data, 0.0), ValidationError);
  CHECK_THROWS_AS(fit_lqr(grid(1, quad), 0.2), DataError);
}

TEST_CASE("LQR beats a bilinear surface on a daily cycle")
{
  Rng rng(5);
  auto f = [](double d, double h) { return 100.0 + 5.0 * d + 40.0 * std::sin(2.0 * std::numbers::pi * h / 24.0); };
  auto data = grid(7, [&](double d, double h) { return f(d, h) + rng.normal(0.0, 2.0); });
  auto lqr = fit_lqr(data, 0.2);
  auto pnr = fit_pnr(data, 1, 1);
  CHECK(std::sqrt(sse(lqr, data)) < std::sqrt(sse(pnr, data)));
}

TEST_CASE("parallel and serial predictions are identical")
{
  Rng rng(8);
  auto data = grid(7, [&](double d, double h) { return 50.0 + d * h + rng.normal(0.0, 3.0); });
  auto queries = grid(2, [](double, double) { return 0.0; }, 6);
  for (const auto& model : {fit_lqr(data, 0.3), fit_pnr(data, 2, 4)}) {
    const auto par = predict_all(model, queries);
    const auto ser = reference::predict_all(model, queries);
    REQUIRE(par.size() == ser.size());
    for (std::size_t i = 0; i < par.size(); ++i)
      CHECK(par[i] == ser[i]);
  }
}

TEST_CASE("predictions of counts are floored at zero")
{
  auto data = grid(4, [](double d, double) { return 30.0 - 10.0 * d; });
  auto m = fit_pnr(data, 1, 1);
  CHECK(predict(m, 6.0, 0.0) == 0.0);
  m.nonnegative = false;
  CHECK(predict(m, 6.0, 0.0) == doctest::Approx(-30.0));
}

TEST_CASE("relative L2 evaluation")
{
  auto data = grid(5, [](double d, double h) { return 3.0 + d + 0.5 * h; });
  auto perfect = fit_pnr(data, 1, 1);
  auto e = l2_eval(perfect, data);
  CHECK(e.l2_avg < 1e-12);
  CHECK(e.l2_std < 1e-12);
  CHECK(e.days_used == 5);

  auto zero = fit_pnr(grid(5, [](double, double) { return 0.0; }), 1, 1);
  CHECK(l2_eval(zero, data).l2_avg == doctest::Approx(1.0));

  auto with_blank_day = data;
  for (int h = 0; h < 24; ++h)
    with_blank_day.push_back({9.0, double(h), 0.0});
  auto e2 = l2_eval(perfect, with_blank_day);
  CHECK(e2.days_used == 5);
  REQUIRE(e2.skipped_days.size() == 1);
  CHECK(e2.skipped_days[0] == 9.0);

  CHECK_THROWS_AS(l2_eval(perfect, std::vector<SurfacePoint>{}), ValidationError);
}

TEST_CASE("low day degree forecasts the next day better than degree five")
{
  Rng rng(2024);
  auto demand = [&](double d, double h) {
    return 1000.0 + 20.0 * d + 400.0 * std::sin(2.0 * std::numbers::pi * (h - 6.0) / 24.0) +
           rng.normal(0.0, 60.0);
  };
  auto train = grid(7, demand);
  auto holdout = grid(1, demand, 7);
  const double low = l2_eval(fit_pnr(train, 1, 5), holdout).l2_avg;
  const double high = l2_eval(fit_pnr(train, 5, 5), holdout).l2_avg;
  CHECK(low < high);
}
