// Truncated explicit-formula sums and their empirical studies.
//
// Everything here revolves around two equivalent views of the same object:
//   in x:  Phi(x) = Re sum_{lambda_n <= X} r_n x^{i lambda_n}
//   in t:  F(t,T) = sum_{lambda_n <= T} |r_n| cos(lambda_n t + beta_n)
// linked by t = log x.  The residual operation compares 2*Phi against the
// sieved truth; for the psi kind the classical formula carries an exactly
// known deterministic term -(log 2pi + log(1 - x^-2)/2)/sqrt(x) which is
// subtracted before judging the truncation error (it dwarfs the tail at
// accessible x, so leaving it in would only measure a known constant).
//
// Time averages over t up to 10^6 and more are needed, so the long loops
// advance each frequency by complex rotation (one multiply per step) with
// periodic re-synchronization from cos/sin, and the cosine product moments
// are integrated in closed form after a product-to-sum expansion rather
// than by quadrature.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "pnerr/coeffs.hpp"
#include "pnerr/common.hpp"
#include "pnerr/quadrature.hpp"
#include "pnerr/sieve.hpp"

namespace pnerr::explicit_sum {

using cplx = std::complex<double>;
using coeffs::CoefficientSequence;

struct ExplicitSum {
  const CoefficientSequence& seq;
  double X;        // truncation height: lambda_n <= X contribute
  double c = 0.0;  // additive constant of the framework identity
};

// The additive constant a kind carries when its summatory normalization
// has a non-vanishing mean: 1/zeta(1/2) for liouville, zero otherwise.
inline double default_constant(coeffs::SeqKind kind) {
  if (kind == coeffs::SeqKind::liouville) return 1.0 / -1.4603545088095868;
  return 0.0;
}

namespace detail {

inline void check_truncation(const ExplicitSum& es) {
  require(es.X <= es.seq.max_lambda() || es.seq.size() == 0, errc::coverage,
          "explicit sum: truncation exceeds sequence coverage");
}

}  // namespace detail

// Phi(x) = Re sum_{lambda <= X} r_n x^{i lambda_n}.
inline double phi_sum(const ExplicitSum& es, double x) {
  require(x >= 2.0, errc::domain, "phi_sum: x must be >= 2");
  detail::check_truncation(es);
  const double lx = std::log(x);
  kahan_sum acc;
  const auto& s = es.seq;
  for (std::size_t i = 0; i < s.size() && s.lambda[i] <= es.X; ++i)
    acc.add(s.modulus[i] * std::cos(s.lambda[i] * lx + s.beta[i]));
  return acc.value();
}

// F(t, T) = sum_{lambda <= T} |r_n| cos(lambda_n t + beta_n).
inline double F_value(const CoefficientSequence& seq, double t, double T) {
  require(T <= seq.max_lambda() || seq.size() == 0, errc::coverage,
          "F_value: T beyond sequence coverage");
  kahan_sum acc;
  for (std::size_t i = 0; i < seq.size() && seq.lambda[i] <= T; ++i)
    acc.add(seq.modulus[i] * std::cos(seq.lambda[i] * t + seq.beta[i]));
  return acc.value();
}

// Deterministic part of the normalized explicit formula, exactly known for
// the psi kind and absent for the others.
inline double deterministic_term(coeffs::SeqKind kind, double x) {
  if (kind != coeffs::SeqKind::psi) return 0.0;
  return -(kLog2Pi + 0.5 * std::log(1.0 - 1.0 / (x * x))) / std::sqrt(x);
}

// E(x) - c - det(x) - 2 Phi(x), where E is the table's normalized value at
// grid point x.  Small when the truncation captures the oscillation.
inline double residual(const ExplicitSum& es, const sieve::SummatoryTable& table,
                       double x) {
  using sieve::SummatoryKind;
  using coeffs::SeqKind;
  static const std::pair<SeqKind, SummatoryKind> pairs[] = {
      {SeqKind::psi, SummatoryKind::psi},
      {SeqKind::mertens, SummatoryKind::mertens_M},
      {SeqKind::liouville, SummatoryKind::liouville_L}};
  bool matched = false;
  for (const auto& [sk, tk] : pairs)
    if (es.seq.kind == sk && table.spec.kind == tk) matched = true;
  require(matched, errc::domain,
          "residual: sequence kind does not match table kind");
  require(table.normalized.size() == table.xs.size(), errc::dependency,
          "residual: table lacks normalized values; run normalize first");

  const auto it = std::lower_bound(table.xs.begin(), table.xs.end(),
                                   x - 1e-9 * std::abs(x));
  require(it != table.xs.end() && std::abs(*it - x) <= 1e-9 * std::abs(x),
          errc::domain, "residual: x is not a grid point of the table");
  const std::size_t idx = std::size_t(it - table.xs.begin());
  const double E = table.normalized[idx];
  return E - es.c - deterministic_term(es.seq.kind, x) - 2.0 * phi_sum(es, x);
}

// ------------------------------------------------------------ Fejer layer

// K(u) = (sin(pi u)/(pi u))^2, K(0) = 1.
inline double fejer_kernel(double u) {
  const double p = kPi * u;
  if (std::abs(p) < 1e-4) {
    const double p2 = p * p;
    return 1.0 - p2 / 3.0 + 2.0 * p2 * p2 / 45.0;
  }
  const double s = std::sin(p) / p;
  return s * s;
}

// Fourier transform: triangular, max(0, 1 - |t|).
inline double fejer_hat(double t) { return std::max(0.0, 1.0 - std::abs(t)); }

// Numeric mass integral_{-Z}^{Z} (T/2pi) K(T u / 2pi) du.  After
// substitution this is 2 integral_0^{W} K(v) dv with W = ZT/2pi; panels
// run between consecutive kernel zeros and are summed tail-first so the
// small contributions are not absorbed by rounding.
inline double kernel_mass(double T, double Z) {
  require(T > 0.0 && Z > 0.0, errc::domain,
          "kernel_mass: T and Z must be positive");
  const double W = Z * T / kTwoPi;
  const std::int64_t full = std::int64_t(W);
  require(full <= 1000000, errc::resource, "kernel_mass: Z*T too large");
  kahan_sum acc;
  if (double(full) < W)
    acc.add(gauss_legendre(fejer_kernel, double(full), W, 16));
  for (std::int64_t k = full; k-- > 0;)
    acc.add(gauss_legendre(fejer_kernel, double(k), double(k + 1), 16));
  return 2.0 * acc.value();
}

struct SmoothResult {
  double value = 0.0;
  double error_estimate = 0.0;    // from per-panel order refinement
  bool window_advisory = false;   // Z smaller than log^2 Y: weak averaging
};

// integral_{-Z}^{Z} (T/2pi) K(Tu/2pi) F(t+u, Y) du.
//
// Panels are bounded by the kernel zeros (width 2pi/T); each is split so
// the fastest frequency present oscillates at most ~twice per subpanel,
// then integrated by Gauss-Legendre with a 16-vs-32 point comparison as
// the error estimate.
inline SmoothResult fejer_smooth(const CoefficientSequence& seq, double t,
                                 double T, double Z, double Y) {
  require(Y >= T && T >= 2.0, errc::domain,
          "fejer_smooth: need Y >= T >= 2");
  require(Z > 0.0, errc::domain, "fejer_smooth: Z must be positive");
  require(Y <= seq.max_lambda() || seq.size() == 0, errc::coverage,
          "fejer_smooth: Y beyond sequence coverage");

  const double panel = kTwoPi / T;
  const std::int64_t n_panels = std::int64_t(std::ceil(Z / panel));
  require(n_panels <= 4000000, errc::resource,
          "fejer_smooth: too many kernel panels");
  double lambda_max = 0.0;
  for (std::size_t i = 0; i < seq.size() && seq.lambda[i] <= Y; ++i)
    lambda_max = seq.lambda[i];
  const int sub = int(std::min(64.0, std::max(1.0, std::ceil(lambda_max / T))));

  auto integrand = [&](double u) {
    return (T / kTwoPi) * fejer_kernel(T * u / kTwoPi) *
           F_value(seq, t + u, Y);
  };
  kahan_sum v16, v32;
  for (std::int64_t k = -n_panels; k < n_panels; ++k) {
    const double a = std::max(-Z, double(k) * panel);
    const double b = std::min(Z, double(k + 1) * panel);
    if (a >= b) continue;
    const double w = (b - a) / sub;
    for (int j = 0; j < sub; ++j) {
      v16.add(gauss_legendre(integrand, a + j * w, a + (j + 1) * w, 16));
      v32.add(gauss_legendre(integrand, a + j * w, a + (j + 1) * w, 32));
    }
  }
  SmoothResult out;
  out.value = v32.value();
  out.error_estimate = std::abs(v32.value() - v16.value());
  out.window_advisory = Z < std::pow(std::log(Y), 2.0);
  require(out.error_estimate <=
              1e-6 * (1.0 + std::abs(out.value)) + 1e-9,
          errc::accuracy,
          "fejer_smooth: quadrature did not converge (estimate " +
              format_full(out.error_estimate) + ")");
  return out;
}

// ------------------------------------------------------------- scans

struct ScanResult {
  double t_begin = 0.0, t_end = 0.0, step = 0.0;
  double max_value = 0.0, argmax = 0.0;
  double min_value = 0.0, argmin = 0.0;
  bool resolution_warning = false;
  std::vector<double> sorted_values;  // ascending, for measure queries

  // Fraction of grid points with F > threshold: a survival function.
  double measure_above(double threshold) const {
    if (sorted_values.empty()) return 0.0;
    const auto it = std::upper_bound(sorted_values.begin(),
                                     sorted_values.end(), threshold);
    return double(sorted_values.end() - it) / double(sorted_values.size());
  }
};

inline ScanResult scan_extremes(const CoefficientSequence& seq, double T,
                                double t_begin, double t_end, double step) {
  require(T <= seq.max_lambda(), errc::coverage,
          "scan_extremes: T beyond sequence coverage");
  require(t_end > t_begin && step > 0.0, errc::domain,
          "scan_extremes: empty or inverted scan range");
  const std::int64_t n = std::int64_t((t_end - t_begin) / step) + 1;
  require(n <= 50000000, errc::resource, "scan_extremes: grid too large");

  ScanResult out;
  out.t_begin = t_begin;
  out.t_end = t_end;
  out.step = step;
  out.resolution_warning = step > kPi / (10.0 * T);

  std::size_t m = 0;
  while (m < seq.size() && seq.lambda[m] <= T) ++m;

  out.sorted_values.resize(std::size_t(n));
  out.max_value = -1e300;
  out.min_value = 1e300;
  // Rotation recurrence per frequency, re-synchronized in tiles.
  constexpr std::int64_t kTile = 1 << 14;
  std::vector<cplx> z(m), w(m);
  for (std::int64_t base = 0; base < n; base += kTile) {
    const std::int64_t hi = std::min(n, base + kTile);
    const double t0 = t_begin + double(base) * step;
    for (std::size_t i = 0; i < m; ++i) {
      z[i] = std::polar(seq.modulus[i], seq.lambda[i] * t0 + seq.beta[i]);
      w[i] = std::polar(1.0, seq.lambda[i] * step);
    }
    for (std::int64_t k = base; k < hi; ++k) {
      kahan_sum f;
      for (std::size_t i = 0; i < m; ++i) {
        f.add(z[i].real());
        z[i] *= w[i];
      }
      const double v = f.value();
      out.sorted_values[std::size_t(k)] = v;
      if (v > out.max_value) {
        out.max_value = v;
        out.argmax = t_begin + double(k) * step;
      }
      if (v < out.min_value) {
        out.min_value = v;
        out.argmin = t_begin + double(k) * step;
      }
    }
  }
  std::sort(out.sorted_values.begin(), out.sorted_values.end());
  return out;
}

// ------------------------------------------------- Laplace time average

// (1/(t_max - 1)) integral_1^{t_max} exp(s F(t,T)) dt by composite Simpson
// with a step resolving the fastest oscillation.  Checks Jensen's
// inequality against the weighted mean of F on every run.
inline double empirical_laplace(const CoefficientSequence& seq, double s,
                                double T, double t_max) {
  require(T <= seq.max_lambda(), errc::coverage,
          "empirical_laplace: T beyond sequence coverage");
  require(t_max > 1.0, errc::domain, "empirical_laplace: t_max must exceed 1");
  if (s == 0.0) return 1.0;

  std::size_t m = 0;
  double lambda_max = 0.0;
  while (m < seq.size() && seq.lambda[m] <= T) lambda_max = seq.lambda[m++];
  require(m > 0, errc::domain, "empirical_laplace: no frequencies below T");

  const double step_bound = std::min(kPi / (10.0 * lambda_max), 0.01);
  std::int64_t n = std::int64_t(std::ceil((t_max - 1.0) / step_bound));
  n += n % 2;  // Simpson needs an even interval count
  require(n <= 2000000000, errc::resource,
          "empirical_laplace: step/t_max grid too large");
  const double h = (t_max - 1.0) / double(n);

  kahan_sum integral, weighted_f;
  constexpr std::int64_t kTile = 1 << 14;
  std::vector<cplx> z(m), w(m);
  for (std::int64_t base = 0; base <= n; base += kTile) {
    const std::int64_t hi = std::min(n + 1, base + kTile);
    const double t0 = 1.0 + double(base) * h;
    for (std::size_t i = 0; i < m; ++i) {
      z[i] = std::polar(seq.modulus[i], seq.lambda[i] * t0 + seq.beta[i]);
      w[i] = std::polar(1.0, seq.lambda[i] * h);
    }
    for (std::int64_t k = base; k < hi; ++k) {
      double f = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        f += z[i].real();
        z[i] *= w[i];
      }
      const double weight =
          (k == 0 || k == n) ? 1.0 : ((k % 2) ? 4.0 : 2.0);
      const double arg = s * f;
      require(arg < kExpArgLimit, errc::accuracy,
              "empirical_laplace: exp argument beyond overflow guard");
      integral.add(weight * std::exp(arg));
      weighted_f.add(weight * f);
    }
  }
  // Simpson total weight sums to 3n/h-normalized mass (t_max - 1).
  const double mass = 3.0 * double(n);
  const double value = integral.value() / mass;
  const double mean_f = weighted_f.value() / mass;
  require(value >= std::exp(s * mean_f) - 1e-9 * (1.0 + value),
          errc::precision, "empirical_laplace: Jensen check failed");
  return value;
}

// ------------------------------------------------- cosine product moments

struct CosineMoment {
  double time_average = 0.0;       // (1/t_max) integral_1^{t_max}
  double random_expectation = 0.0; // product of central cosine moments
};

// Product moment of cos(lambda_{n_j} t + beta_{n_j}) over a multiset of
// sequence indices.  The time average is integrated in closed form after
// the product-to-sum expansion (2^k cosine terms of combined frequency
// sum eps . lambda); combined frequencies below 1e-9 are treated as exact
// cancellations and contribute their constant value.
inline CosineMoment cosine_moment(const CoefficientSequence& seq,
                                  const std::vector<std::size_t>& indices,
                                  double t_max) {
  const std::size_t k = indices.size();
  require(k >= 1, errc::domain, "cosine_moment: empty index multiset");
  require(k <= 8, errc::resource, "cosine_moment: multiset larger than 8");
  require(t_max > 1.0, errc::domain, "cosine_moment: t_max must exceed 1");
  for (std::size_t idx : indices)
    require(idx < seq.size(), errc::domain,
            "cosine_moment: index out of range");

  CosineMoment out;
  kahan_sum acc;
  const std::size_t combos = std::size_t(1) << k;
  for (std::size_t mask = 0; mask < combos; ++mask) {
    double omega = 0.0, phase = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      const double sign = (mask >> j) & 1 ? 1.0 : -1.0;
      omega += sign * seq.lambda[indices[j]];
      phase += sign * seq.beta[indices[j]];
    }
    if (std::abs(omega) <= 1e-9) {
      acc.add((t_max - 1.0) * std::cos(phase));
    } else {
      acc.add((std::sin(omega * t_max + phase) - std::sin(omega + phase)) /
              omega);
    }
  }
  out.time_average = acc.value() / (double(combos) * t_max);

  // Random side: independent uniform phases; only even powers of each
  // distinct index survive, contributing binom(m, m/2) / 2^m.
  std::vector<std::size_t> sorted = indices;
  std::sort(sorted.begin(), sorted.end());
  double expectation = 1.0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const std::size_t mlt = j - i;
    if (mlt % 2) {
      expectation = 0.0;
      break;
    }
    double binom = 1.0;
    for (std::size_t q = 0; q < mlt / 2; ++q)
      binom = binom * double(mlt - q) / double(q + 1);
    expectation *= binom / double(std::size_t(1) << mlt);
    i = j;
  }
  out.random_expectation = expectation;
  return out;
}

}  // namespace pnerr::explicit_sum
