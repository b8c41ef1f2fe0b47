// Coefficient sequences (lambda_n, r_n) and growth-hypothesis fits.
//
// A sequence pairs frequencies lambda_n (zero ordinates, or user data) with
// complex amplitudes r_n.  The stock kinds derive amplitudes from zero
// companions:
//     psi:       r_n = -1/rho_n                 rho_n = 1/2 + i lambda_n
//     mertens:   r_n = 1/(rho_n zeta'(rho_n))
//     liouville: r_n = zeta(2 rho_n)/(rho_n zeta'(rho_n))
// The psi sign is fixed so that every kind satisfies the same framework
// identity  E(x) ~ c + 2 Re sum r_n x^{i lambda_n}  (for psi the classical
// formula carries a leading minus on the zero sum).
//
// The growth fits quantify how S0(T) = sum_{lambda<=T} |r_n| and its
// weighted cousins scale in T.  For zero-derived sequences the natural
// regressor is log log(T/2pi) — the zero-counting function grows like
// (T/2pi) log(T/2pi), and at reachable heights the unnormalized log T
// badly distorts the exponent (measured: psi S0 matches (1/4pi)log^2(T/2pi)
// to ~1% at T ~ 2500 but is off the unnormalized form by ~40%).
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "pnerr/common.hpp"
#include "pnerr/zeta.hpp"

namespace pnerr::coeffs {

using cplx = std::complex<double>;

enum class SeqKind { psi, mertens, liouville, custom };

inline const char* kind_name(SeqKind k) {
  switch (k) {
    case SeqKind::psi: return "psi";
    case SeqKind::mertens: return "mertens";
    case SeqKind::liouville: return "liouville";
    case SeqKind::custom: return "custom";
  }
  return "?";
}

inline SeqKind kind_from_name(const std::string& name) {
  for (SeqKind k : {SeqKind::psi, SeqKind::mertens, SeqKind::liouville,
                    SeqKind::custom})
    if (name == kind_name(k)) return k;
  throw error(errc::usage, "unknown sequence kind '" + name + "'");
}

struct CoefficientSequence {
  SeqKind kind = SeqKind::custom;
  std::vector<double> lambda;   // non-decreasing, positive
  std::vector<cplx> r;
  std::vector<double> modulus;  // |r_n|
  std::vector<double> beta;     // arg r_n in (-pi, pi]

  std::size_t size() const { return lambda.size(); }
  double max_lambda() const { return lambda.empty() ? 0.0 : lambda.back(); }
};

// Build a sequence from a zero table.  For the custom kind the table's
// first companion column is taken as r_n verbatim (the table format is the
// interchange container for user sequences).
inline CoefficientSequence build_sequence(SeqKind kind,
                                          const zeta::ZeroTable& table) {
  CoefficientSequence seq;
  seq.kind = kind;
  const std::size_t n = table.size();
  seq.lambda.reserve(n);
  seq.r.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double g = table.gamma[i];
    require(g > 0.0, errc::domain,
            "build_sequence: frequencies must be positive");
    if (i > 0)
      require(g >= table.gamma[i - 1], errc::domain,
              "build_sequence: frequencies must be non-decreasing");
    const cplx rho(0.5, g);
    const cplx zp = table.zeta_prime[i];
    cplx value;
    switch (kind) {
      case SeqKind::psi:
        value = -1.0 / rho;
        break;
      case SeqKind::mertens:
        require(!std::isnan(zp.real()), errc::dependency,
                "build_sequence: mertens requires zeta'(rho) companions");
        value = 1.0 / (rho * zp);
        break;
      case SeqKind::liouville: {
        const cplx z2 = table.zeta_2rho[i];
        require(!std::isnan(zp.real()) && !std::isnan(z2.real()),
                errc::dependency,
                "build_sequence: liouville requires zeta'(rho) and "
                "zeta(2 rho) companions");
        value = z2 / (rho * zp);
        break;
      }
      case SeqKind::custom:
        require(!std::isnan(zp.real()), errc::dependency,
                "build_sequence: custom requires r values in the first "
                "companion column");
        value = zp;
        break;
    }
    seq.lambda.push_back(g);
    seq.r.push_back(value);
  }
  seq.modulus.reserve(n);
  seq.beta.reserve(n);
  for (const cplx& v : seq.r) {
    seq.modulus.push_back(std::abs(v));
    seq.beta.push_back(std::arg(v));
  }
  return seq;
}

// ------------------------------------------------------------ partial sums

struct PartialSums {
  double S0 = 0.0;  // sum |r_n|
  double S1 = 0.0;  // sum lambda_n |r_n|
  double S2 = 0.0;  // sum lambda_n^2 |r_n|^2
  std::size_t N = 0;
};

inline PartialSums partial_sums(const CoefficientSequence& seq, double T) {
  require(T <= seq.max_lambda(), errc::coverage,
          "partial_sums: T beyond sequence coverage");
  PartialSums out;
  kahan_sum s0, s1, s2;
  for (std::size_t i = 0; i < seq.size() && seq.lambda[i] <= T; ++i) {
    const double m = seq.modulus[i];
    s0.add(m);
    s1.add(seq.lambda[i] * m);
    s2.add(seq.lambda[i] * seq.lambda[i] * m * m);
    ++out.N;
  }
  out.S0 = s0.value();
  out.S1 = s1.value();
  out.S2 = s2.value();
  return out;
}

// Count of frequencies <= T.
inline std::size_t frequency_count(const CoefficientSequence& seq, double T) {
  return std::size_t(
      std::upper_bound(seq.lambda.begin(), seq.lambda.end(), T) -
      seq.lambda.begin());
}

// ------------------------------------------------------------- fits

struct AssumptionReport {
  double alpha_minus = 0.0;
  double alpha_plus = 0.0;
  double alpha = 0.0;
  double A = 0.0;               // exponent of log(T/unit) in S0
  double a2_ratio = 0.0;        // max over grid of S1/(T (log T)^A)
  bool a2_nonincreasing = true; // whether the ratio trended downward
  double theta = 0.0;           // exponent of T in S2
  bool theta_flagged = false;   // theta >= 2
  double kappa_minus = 0.0;     // extremes of N(T)/(T log T)
  double kappa_plus = 0.0;
  double max_short_count_ratio = 0.0;  // max of count(T, T+1] / log T
  double s0_fit_rms = 0.0;      // log-scale fit residuals
  double s2_fit_rms = 0.0;
  double lambda_unit = 1.0;     // frequency unit used in the S0 regressor
};

// Least-squares growth fits over a T-grid.
//
// lambda_unit scales the frequency variable inside the S0 regressor
// log log(T/unit); pass 0 to choose automatically (2pi for zero-derived
// kinds, 1 for custom data).
inline AssumptionReport fit_assumptions(const CoefficientSequence& seq,
                                        const std::vector<double>& grid,
                                        double lambda_unit = 0.0) {
  require(grid.size() >= 8, errc::domain,
          "fit_assumptions: grid needs at least 8 points");
  for (std::size_t i = 1; i < grid.size(); ++i)
    require(grid[i] > grid[i - 1], errc::domain,
            "fit_assumptions: grid must be strictly increasing");
  require(grid.back() >= 10.0 * grid.front(), errc::domain,
          "fit_assumptions: grid must span at least one decade");
  require(grid.back() <= seq.max_lambda() , errc::coverage,
          "fit_assumptions: grid beyond sequence coverage");
  if (lambda_unit == 0.0)
    lambda_unit = (seq.kind == SeqKind::custom) ? 1.0 : kTwoPi;
  require(lambda_unit > 0.0, errc::domain,
          "fit_assumptions: lambda_unit must be positive");
  require(grid.front() / lambda_unit > std::exp(1.0), errc::domain,
          "fit_assumptions: grid too low for the log log regressor");

  const std::size_t m = grid.size();
  std::vector<double> loglogT(m), logT(m), logS0(m), logS2(m);
  std::vector<PartialSums> sums(m);
  for (std::size_t i = 0; i < m; ++i) {
    sums[i] = partial_sums(seq, grid[i]);
    require(sums[i].N > 0 && sums[i].S0 > 0.0 && sums[i].S2 > 0.0,
            errc::domain, "fit_assumptions: empty sums on the grid");
    loglogT[i] = std::log(std::log(grid[i] / lambda_unit));
    logT[i] = std::log(grid[i]);
    logS0[i] = std::log(sums[i].S0);
    logS2[i] = std::log(sums[i].S2);
  }

  AssumptionReport rep;
  rep.lambda_unit = lambda_unit;

  const auto f0 = linear_fit(loglogT, logS0);
  rep.A = f0.slope;
  rep.s0_fit_rms = f0.rms_residual;

  // alpha as the geometric mean of S0/(log(T/unit))^A; extremes bracket it.
  kahan_sum log_ratio;
  double lo = 1e300, hi = -1e300;
  for (std::size_t i = 0; i < m; ++i) {
    const double ratio = logS0[i] - rep.A * loglogT[i];
    log_ratio.add(ratio);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  rep.alpha = std::exp(log_ratio.value() / double(m));
  rep.alpha_minus = std::exp(lo);
  rep.alpha_plus = std::exp(hi);

  // Assumption-2 ratio S1/(T (log T)^A): reported, trend flagged.
  double prev = 1e300;
  for (std::size_t i = 0; i < m; ++i) {
    const double ratio =
        sums[i].S1 / (grid[i] * std::pow(std::log(grid[i]), rep.A));
    rep.a2_ratio = std::max(rep.a2_ratio, ratio);
    if (ratio > prev + 1e-12) rep.a2_nonincreasing = false;
    prev = ratio;
  }

  const auto f2 = linear_fit(logT, logS2);
  rep.theta = f2.slope;
  rep.s2_fit_rms = f2.rms_residual;
  rep.theta_flagged = rep.theta >= 2.0;

  double kmin = 1e300, kmax = -1e300;
  for (std::size_t i = 0; i < m; ++i) {
    const double k = double(sums[i].N) / (grid[i] * std::log(grid[i]));
    kmin = std::min(kmin, k);
    kmax = std::max(kmax, k);
  }
  rep.kappa_minus = kmin;
  rep.kappa_plus = kmax;

  for (std::size_t i = 0; i < m; ++i) {
    if (grid[i] + 1.0 > seq.max_lambda()) break;
    const double cnt = double(frequency_count(seq, grid[i] + 1.0) -
                              frequency_count(seq, grid[i]));
    rep.max_short_count_ratio =
        std::max(rep.max_short_count_ratio, cnt / std::log(grid[i]));
  }
  return rep;
}

}  // namespace pnerr::coeffs
