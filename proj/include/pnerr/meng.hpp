// Direct numerical check of the min-kernel double sum controlling the
// off-window mass of truncated oscillating sums,
//
//   D(T, X) = sum_{T < lambda_n, lambda_m <= X}
//             |r_n r_m| min(1, 1/|lambda_n - lambda_m|),
//
// its companion unit-window integral
//
//   W(T, X, V) = int_V^{V+1} |sum_{T < lambda_n <= X} r_n e^{iy lambda_n}|^2 dy
//
// evaluated in closed form pairwise, partial-summation tail sums, and the
// fitted decay exponent of D along a T grid.  Pairwise the window kernel
// obeys |int_V^{V+1} e^{iy d} dy| <= min(1, 2/|d|) <= 2 min(1, 1/|d|), so
// W <= 2 D always; reports quote the slack factor 4 as the checked bound.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "pnerr/coeffs.hpp"
#include "pnerr/common.hpp"

namespace pnerr::meng {

using cplx = std::complex<double>;

namespace detail {

struct Range {
  std::size_t lo = 0, hi = 0;  // indices with T < lambda <= X
};

inline Range select(const coeffs::CoefficientSequence& seq, double T,
                    double X) {
  require(T < X, errc::domain, "meng: need T < X");
  require(X <= seq.max_lambda() || seq.size() == 0, errc::coverage,
          "meng: X beyond sequence coverage");
  Range r;
  r.lo = std::size_t(
      std::upper_bound(seq.lambda.begin(), seq.lambda.end(), T) -
      seq.lambda.begin());
  r.hi = std::size_t(
      std::upper_bound(seq.lambda.begin(), seq.lambda.end(), X) -
      seq.lambda.begin());
  const double K = double(r.hi - r.lo);
  require(K * K <= 1e8, errc::resource,
          "meng: pair count " + format_full(K * K) +
              " exceeds the 1e8 guard");
  return r;
}

}  // namespace detail

// Exact O(K^2) evaluation of D(T, X); coincident frequencies take the
// diagonal convention min(1, 1/0) := 1.  Optionally reports K^2.
inline double double_sum(const coeffs::CoefficientSequence& seq, double T,
                         double X, std::int64_t* pair_count = nullptr) {
  const auto rg = detail::select(seq, T, X);
  const std::int64_t K = std::int64_t(rg.hi - rg.lo);
  if (pair_count) *pair_count = K * K;
  if (K == 0) return 0.0;
  return reduce_tiled(
      K,
      [&](std::int64_t i) {
        const std::size_t a = rg.lo + std::size_t(i);
        const double ra = seq.modulus[a];
        kahan_sum row;
        row.add(ra * ra);
        for (std::size_t b = a + 1; b < rg.hi; ++b) {
          const double gap = seq.lambda[b] - seq.lambda[a];
          const double w = (gap < 1.0) ? 1.0 : 1.0 / gap;
          row.add(2.0 * ra * seq.modulus[b] * w);
        }
        return row.value();
      },
      64);
}

// W(T, X, V) via the closed-form pair integral
// int_V^{V+1} e^{iyd} dy = e^{iVd} (e^{id} - 1)/(id), diagonal value 1.
inline double window_integral(const coeffs::CoefficientSequence& seq, double T,
                              double X, double V,
                              std::int64_t* pair_count = nullptr) {
  const auto rg = detail::select(seq, T, X);
  const std::int64_t K = std::int64_t(rg.hi - rg.lo);
  if (pair_count) *pair_count = K * K;
  if (K == 0) return 0.0;
  return reduce_tiled(
      K,
      [&](std::int64_t i) {
        const std::size_t a = rg.lo + std::size_t(i);
        kahan_sum row;
        row.add(std::norm(seq.r[a]));
        for (std::size_t b = a + 1; b < rg.hi; ++b) {
          const double d = seq.lambda[a] - seq.lambda[b];
          cplx I(1.0, 0.0);
          if (d != 0.0)
            I = std::polar(1.0, V * d) * (std::polar(1.0, d) - cplx(1.0, 0.0)) /
                cplx(0.0, d);
          row.add(2.0 * std::real(seq.r[a] * std::conj(seq.r[b]) * I));
        }
        return row.value();
      },
      64);
}

// Partial-summation tails sum_{lambda > T} |r| lambda^{1-a} and
// sum_{lambda > T} |r|^2 lambda^{2-b} over the available data.  Exponents
// outside the admissible ranges a > (theta+1)/2, b > theta are still
// computed but flagged.
struct TailSums {
  double tail1 = 0.0;
  double tail2 = 0.0;
  bool a_admissible = true;
  bool b_admissible = true;
};

inline TailSums tail_sums(const coeffs::CoefficientSequence& seq, double T,
                          double a, double b, double theta = 1.0) {
  TailSums out;
  out.a_admissible = a > 0.5 * (theta + 1.0);
  out.b_admissible = b > theta;
  kahan_sum t1, t2;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const double l = seq.lambda[i];
    if (l <= T) continue;
    const double m = seq.modulus[i];
    t1.add(m * std::pow(l, 1.0 - a));
    t2.add(m * m * std::pow(l, 2.0 - b));
  }
  out.tail1 = t1.value();
  out.tail2 = t2.value();
  return out;
}

struct MengReport {
  std::vector<double> T_grid;
  double X = 0.0;
  double V = 0.0;
  double theta_used = 1.0;
  double epsilon = 0.1;  // reporting epsilon in the predicted exponent
  std::vector<double> double_sums;
  std::vector<double> window_integrals;
  std::vector<std::int64_t> pair_counts;
  double decay_exponent = 0.0;
  double predicted_exponent = 0.0;  // -(2 - theta_used - epsilon)
  double fit_rms = 0.0;
  bool flat = false;  // |fitted slope| < 0.05: no decay visible
};

// Least-squares slope of log D vs log T; fills the report's fit fields
// and returns the slope.
inline double decay_fit(MengReport& report) {
  require(report.T_grid.size() >= 4, errc::domain,
          "decay_fit: need at least 4 grid points");
  require(report.double_sums.size() == report.T_grid.size(), errc::dependency,
          "decay_fit: report lacks double-sum values");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < report.T_grid.size(); ++i) {
    require(report.T_grid[i] > 0.0 && report.double_sums[i] > 0.0,
            errc::domain, "decay_fit: nonpositive grid or sum value");
    if (i)
      require(report.T_grid[i] > report.T_grid[i - 1], errc::domain,
              "decay_fit: T grid must be strictly increasing");
    xs.push_back(std::log(report.T_grid[i]));
    ys.push_back(std::log(report.double_sums[i]));
  }
  const auto fit = linear_fit(xs, ys);
  report.decay_exponent = fit.slope;
  report.fit_rms = fit.rms_residual;
  report.predicted_exponent = -(2.0 - report.theta_used - report.epsilon);
  report.flat = std::abs(fit.slope) < 0.05;
  return fit.slope;
}

inline MengReport meng_report(const coeffs::CoefficientSequence& seq,
                              const std::vector<double>& T_grid, double X,
                              double V, double theta) {
  require(!T_grid.empty(), errc::domain, "meng_report: empty T grid");
  MengReport rep;
  rep.T_grid = T_grid;
  rep.X = X;
  rep.V = V;
  rep.theta_used = theta;
  for (double T : T_grid) {
    std::int64_t pc = 0;
    rep.double_sums.push_back(double_sum(seq, T, X, &pc));
    rep.pair_counts.push_back(pc);
    rep.window_integrals.push_back(window_integral(seq, T, X, V));
  }
  if (rep.T_grid.size() >= 4) decay_fit(rep);
  return rep;
}

}  // namespace pnerr::meng
