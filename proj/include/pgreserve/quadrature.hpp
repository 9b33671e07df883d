#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <span>
#include <vector>

namespace pgreserve::quad {

/// Result of an adaptive integration of an N-component integrand.
template <std::size_t N>
struct Result
{
  std::array<double, N> value{};
  double error = 0.0;   // largest component error estimate
  int evaluations = 0;
  bool converged = false;
};

namespace detail {

// 21-point Kronrod rule with its embedded 10-point Gauss rule (QUADPACK qk21).
inline constexpr std::array<double, 11> kXgk = {
  0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
  0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
  0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
  0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
  0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
  0.000000000000000000000000000000000};
inline constexpr std::array<double, 11> kWgk = {
  0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
  0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
  0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
  0.123491976262065851077208615936855, 0.134709217311473325928054001771707,
  0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
  0.149445554002916905664936468389821};
inline constexpr std::array<double, 5> kWg = {
  0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
  0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
  0.295524224714752870173892994651338};

template <std::size_t N>
struct Segment
{
  double a, b;
  std::array<double, N> value;
  double error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <std::size_t N, class F>
Segment<N> gk21(const F& f, double a, double b)
{
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  std::array<double, N> fc = f(centre);
  std::array<double, N> kronrod{};
  std::array<double, N> gauss{};
  for (std::size_t k = 0; k < N; ++k)
    kronrod[k] = fc[k] * kWgk[10];

  for (std::size_t j = 0; j < 10; ++j) {
    const double dx = half * kXgk[j];
    const std::array<double, N> f1 = f(centre - dx);
    const std::array<double, N> f2 = f(centre + dx);
    for (std::size_t k = 0; k < N; ++k) {
      const double sum = f1[k] + f2[k];
      kronrod[k] += kWgk[j] * sum;
      if (j % 2 == 1)
        gauss[k] += kWg[j / 2] * sum;
    }
  }

  Segment<N> seg{a, b, {}, 0.0};
  for (std::size_t k = 0; k < N; ++k) {
    seg.value[k] = kronrod[k] * half;
    const double err = std::abs((kronrod[k] - gauss[k]) * half);
    seg.error = std::max(seg.error, err);
  }
  return seg;
}

} // namespace detail

/// Globally adaptive Gauss-Kronrod integration of a vector-valued integrand
/// over the consecutive intervals of `breaks` (sorted, at least two points).
/// The segment with the largest error estimate is bisected until the summed
/// error falls below max(abs_tol, rel_tol * |I|) for every component, or
/// max_segments is reached (converged = false).
///
/// `f` maps a double to std::array<double, N>.
template <std::size_t N, class F>
Result<N> integrate(const F& f, std::span<const double> breaks, double abs_tol = 1e-10,
                    double rel_tol = 1e-12, int max_segments = 4000)
{
  Result<N> out;
  std::priority_queue<detail::Segment<N>> heap;
  std::array<double, N> value{};
  double error = 0.0;
  int segments = 0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (!(breaks[i + 1] > breaks[i]))
      continue;
    auto seg = detail::gk21<N>(f, breaks[i], breaks[i + 1]);
    for (std::size_t k = 0; k < N; ++k)
      value[k] += seg.value[k];
    error += seg.error;
    heap.push(seg);
    ++segments;
    out.evaluations += 21;
  }
  if (heap.empty()) {
    out.converged = true;
    return out;
  }

  for (;;) {
    double scale = 0.0;
    for (double v : value)
      scale = std::max(scale, std::abs(v));
    if (error <= std::max(abs_tol, rel_tol * scale)) {
      out.converged = true;
      break;
    }
    if (segments >= max_segments)
      break;

    const detail::Segment<N> worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // Cannot split further in double precision.
      heap.push(worst);
      break;
    }
    auto left = detail::gk21<N>(f, worst.a, mid);
    auto right = detail::gk21<N>(f, mid, worst.b);
    out.evaluations += 42;
    for (std::size_t k = 0; k < N; ++k)
      value[k] += left.value[k] + right.value[k] - worst.value[k];
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++segments;
  }

  // Final re-sum over the segments drops the drift of the running update.
  out.value = {};
  out.error = 0.0;
  while (!heap.empty()) {
    const auto& s = heap.top();
    for (std::size_t k = 0; k < N; ++k)
      out.value[k] += s.value[k];
    out.error += s.error;
    heap.pop();
  }
  return out;
}

template <std::size_t N, class F>
Result<N> integrate(const F& f, double a, double b, double abs_tol = 1e-10,
                    double rel_tol = 1e-12, int max_segments = 4000)
{
  const std::array<double, 2> breaks{a, b};
  return integrate<N>(f, std::span<const double>(breaks), abs_tol, rel_tol, max_segments);
}

/// Scalar convenience wrapper.
template <class F>
Result<1> integrate_scalar(const F& f, double a, double b, double abs_tol = 1e-10,
                           double rel_tol = 1e-12, int max_segments = 4000)
{
  return integrate<1>([&f](double x) { return std::array<double, 1>{f(x)}; }, a, b,
                      abs_tol, rel_tol, max_segments);
}

} // namespace pgreserve::quad
