#include <cmath>
#include <numbers>

#include "doctest.h"
#include "pgreserve/quadrature.hpp"

using namespace pgreserve;

TEST_CASE("quadrature integrates smooth functions to machine-level accuracy")
{
  auto r = quad::integrate_scalar([](double x) { return std::sin(x); }, 0.0, std::numbers::pi);
  CHECK(r.converged);
  CHECK(r.value[0] == doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("quadrature handles an integrable endpoint singularity")
{
  auto r = quad::integrate_scalar([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-10,
                                  1e-10);
  CHECK(std::abs(r.value[0] - 2.0) < 1e-8);
}

TEST_CASE("vector integrands share one adaptive partition")
{
  auto f = [](double x) { return std::array<double, 3>{1.0, x, x * x}; };
  auto r = quad::integrate<3>(f, 0.0, 3.0);
  CHECK(r.value[0] == doctest::Approx(3.0));
  CHECK(r.value[1] == doctest::Approx(4.5));
  CHECK(r.value[2] == doctest::Approx(9.0));
}

TEST_CASE("empty or reversed ranges integrate to zero")
{
  auto r = quad::integrate_scalar([](double) { return 1.0; }, 1.0, 1.0);
  CHECK(r.converged);
  CHECK(r.value[0] == 0.0);
}

TEST_CASE("breakpoints are honoured")
{
  const std::array<double, 3> breaks{-1.0, 0.0, 1.0};
  auto r = quad::integrate<1>([](double x) { return std::array<double, 1>{std::abs(x)}; },
                              std::span<const double>(breaks));
  CHECK(r.value[0] == doctest::Approx(1.0).epsilon(1e-14));
}
