// Quadrature helpers.
//
// Composite Simpson is the workhorse for time averages over [1, t_max]; the
// step is chosen by the caller from the highest frequency present.  Panel
// Gauss-Legendre is used for kernel integrals whose natural panels are the
// kernel's zeros.  The periodic trapezoid rule converges geometrically for
// analytic periodic integrands and backs the Bessel integral representation.
#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "pnerr/common.hpp"

namespace pnerr {

// Composite Simpson over [a, b] with an even number of sub-intervals chosen
// so the step does not exceed max_step.
template <class F>
double simpson(F&& f, double a, double b, double max_step) {
  require(b > a, errc::domain, "simpson: need b > a");
  require(max_step > 0.0, errc::domain, "simpson: step must be positive");
  std::int64_t n = std::int64_t(std::ceil((b - a) / max_step));
  if (n < 2) n = 2;
  if (n % 2) ++n;
  const double h = (b - a) / double(n);
  // f(a) + f(b) + 4*odd + 2*even, fused into one compensated pass.
  kahan_sum acc;
  acc.add(f(a));
  acc.add(f(b));
  for (std::int64_t i = 1; i < n; ++i) {
    const double w = (i % 2) ? 4.0 : 2.0;
    acc.add(w * f(a + double(i) * h));
  }
  return acc.value() * h / 3.0;
}

namespace detail {

struct gl_rule {
  std::vector<double> x;  // nodes on [-1, 1]
  std::vector<double> w;
};

// Gauss-Legendre nodes/weights by Newton iteration on P_n.
inline gl_rule gauss_legendre_rule(int n) {
  gl_rule r;
  r.x.resize(std::size_t(n));
  r.w.resize(std::size_t(n));
  for (int i = 0; i < n; ++i) {
    // Chebyshev-like initial guess.
    double x = std::cos(kPi * (double(i) + 0.75) / (double(n) + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - double(j) * p2) / double(j + 1);
      }
      pp = double(n) * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.x[std::size_t(i)] = x;
    r.w[std::size_t(i)] = 2.0 / ((1.0 - x * x) * pp * pp);
  }
  return r;
}

inline const gl_rule& cached_gl_rule(int n) {
  static gl_rule r16 = gauss_legendre_rule(16);
  static gl_rule r32 = gauss_legendre_rule(32);
  require(n == 16 || n == 32, errc::domain, "gauss_legendre: cached orders are 16 and 32");
  return (n == 16) ? r16 : r32;
}

}  // namespace detail

// Gauss-Legendre on a single panel [a, b].
template <class F>
double gauss_legendre(F&& f, double a, double b, int order = 16) {
  const auto& r = detail::cached_gl_rule(order);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  kahan_sum acc;
  for (std::size_t i = 0; i < r.x.size(); ++i)
    acc.add(r.w[i] * f(mid + half * r.x[i]));
  return acc.value() * half;
}

// Trapezoid rule over one full period of a periodic integrand; geometric
// convergence for analytic f, so modest n reaches machine precision.
template <class F>
double periodic_trapezoid(F&& f, double period, int n) {
  require(n >= 4, errc::domain, "periodic_trapezoid: need n >= 4");
  const double h = period / double(n);
  kahan_sum acc;
  for (int i = 0; i < n; ++i) acc.add(f(double(i) * h));
  return acc.value() * h;
}

}  // namespace pnerr
