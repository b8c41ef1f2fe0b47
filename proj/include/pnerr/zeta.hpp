// Nontrivial zeta zeros and companion values.
//
// Two evaluation engines drive everything here:
//
//  * Euler-Maclaurin for zeta(s) and zeta'(s) at complex s: truncation length
//    N ~ |Im s|/4 with 25 Bernoulli correction terms gives ~1e-11 absolute
//    error over the working range (|Im s| <= ~2e4, Re s >= -2).  Terms are
//    built iteratively — ratios of consecutive Bernoulli corrections stay
//    O(1), so nothing overflows.
//
//  * Riemann-Siegel for Z(t) at large t: the main sum over n <= floor(a),
//    a = sqrt(t/2pi), plus the first four correction terms
//        Z = 2 sum n^{-1/2} cos(theta(t) - t log n)
//          + (-1)^{m-1} a^{-1/2} [C0(z) + C1(z)/a + C2(z)/a^2 + C3(z)/a^3],
//    z = 2(a-m)-1.  The corrections are combinations of derivatives of
//        Psi(z) = cos(pi(z^2/2 + 3/8)) / cos(pi z),
//    an entire function (every zero of the denominator is cancelled), so a
//    single order-64 Taylor expansion about 0 evaluates all derivatives on
//    [-1,1] stably.  In the variable z:
//        C0 =  Psi
//        C1 = -Psi'''/(12 pi^2)
//        C2 =  Psi''/(16 pi^2)  + Psi^(6)/(288 pi^4)
//        C3 = -Psi'/(32 pi^2)   - Psi^(5)/(120 pi^4) - Psi^(9)/(10368 pi^6)
//    Residual error is ~3e-4 * a^{-9/2}: below ~2e-8 for t >= 500.  Under
//    t = 500 the Euler-Maclaurin engine evaluates Z directly (the asymptotic
//    expansion degrades at small t), so Z is accurate to ~1e-11 there.
//
// Zeros are bracketed by a sign scan with step ~ 1/32 of the local mean gap
// (finer than the closest known pair below height 10^4, the Lehmer pair near
// t = 7005 with gap 0.0377), refined by bisection, and the finished table is
// verified against the Riemann-von Mangoldt count — a failed count check
// triggers a finer rescan and, if unresolved, a hard error.
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include "pnerr/common.hpp"

namespace pnerr::zeta {

using cplx = std::complex<double>;

// ------------------------------------------------------- Euler-Maclaurin

namespace detail {

// B_{2k}/(2k)! for k = 1..25.
inline constexpr std::array<double, 25> kBernoulliOverFactorial = {
    0.083333333333333333,    -0.0013888888888888889,  3.3068783068783069e-5,
    -8.2671957671957672e-7,  2.0876756987868099e-8,   -5.2841901386874932e-10,
    1.3382536530684679e-11,  -3.3896802963225829e-13, 8.5860620562778446e-15,
    -2.1748686985580619e-16, 5.5090028283602295e-18,  -1.3954464685812523e-19,
    3.5347070396294675e-21,  -8.9535174270375469e-23, 2.2679524523376831e-24,
    -5.7447906688722024e-26, 1.4551724756148649e-27,  -3.6859949406653102e-29,
    9.3367342570950447e-31,  -2.3650224157006299e-32, 5.9906717624821343e-34,
    -1.5174548844682903e-35, 3.8437581254541882e-37,  -9.7363530726466910e-39,
    2.4662470442006810e-40};

// Cached natural logs of small integers (Euler-Maclaurin main sums and the
// Riemann-Siegel main sum hit these constantly).
inline const double* log_table(std::size_t& size) {
  static std::vector<double> table;
  static std::once_flag once;
  std::call_once(once, [] {
    table.resize(1 << 15);
    table[0] = 0.0;
    for (std::size_t n = 1; n < table.size(); ++n)
      table[n] = std::log(double(n));
  });
  size = table.size();
  return table.data();
}

inline double log_n(std::int64_t n) {
  std::size_t size = 0;
  const double* t = log_table(size);
  return (n > 0 && std::size_t(n) < size) ? t[std::size_t(n)]
                                          : std::log(double(n));
}

struct kahan_cplx {
  kahan_sum re, im;
  void add(cplx z) {
    re.add(z.real());
    im.add(z.imag());
  }
  cplx value() const { return {re.value(), im.value()}; }
};

}  // namespace detail

struct zeta_values {
  cplx zeta;
  cplx zeta_prime;
};

// zeta(s) and zeta'(s) by Euler-Maclaurin.  Valid for Re s > -2 away from
// the pole at s = 1; absolute error ~1e-11 for |Im s| up to ~2e4.
inline zeta_values zeta_with_derivative(cplx s) {
  require(std::abs(s - cplx(1.0, 0.0)) > 1e-8, errc::domain,
          "zeta: s too close to the pole at 1");
  require(s.real() > -2.0, errc::domain,
          "zeta: Euler-Maclaurin engine restricted to Re s > -2");
  const double t = std::abs(s.imag());
  require(t <= 1e6, errc::domain, "zeta: |Im s| beyond supported range");
  const std::int64_t N =
      std::max<std::int64_t>(32, std::int64_t(t / 4.0) + 24);
  const double sigma = s.real();

  detail::kahan_cplx z, zp;
  z.add(cplx(1.0, 0.0));  // n = 1
  for (std::int64_t n = 2; n < N; ++n) {
    const double L = detail::log_n(n);
    const double mag = std::exp(-sigma * L);
    const double ph = -s.imag() * L;
    const cplx nms = mag * cplx(std::cos(ph), std::sin(ph));
    z.add(nms);
    zp.add(-L * nms);
  }
  const double LN = detail::log_n(N);
  const cplx N1s =
      std::exp(-(s - 1.0) * LN);  // N^{1-s}
  const cplx Nms = std::exp(-s * LN);
  z.add(N1s / (s - 1.0));
  zp.add(-LN * N1s / (s - 1.0) - N1s / ((s - 1.0) * (s - 1.0)));
  z.add(0.5 * Nms);
  zp.add(-0.5 * LN * Nms);

  // Bernoulli corrections T_k = B_{2k}/(2k)! * poch(s,2k-1) * N^{1-s-2k},
  // built iteratively; dT_k/ds = T_k (H_k - log N), H_k = sum 1/(s+j).
  const auto& B = detail::kBernoulliOverFactorial;
  cplx T = B[0] * s * Nms / double(N);  // k = 1
  cplx H = 1.0 / s;
  for (std::size_t k = 1;; ++k) {
    z.add(T);
    zp.add(T * (H - LN));
    if (k == B.size()) break;
    const double tiny = 1e-18 * (std::abs(z.value()) + 1e-300);
    if (std::abs(T) < tiny) break;
    const cplx f1 = s + double(2 * k - 1), f2 = s + double(2 * k);
    T *= (B[k] / B[k - 1]) * f1 * f2 / double(N * N);
    H += 1.0 / f1 + 1.0 / f2;
  }
  return {z.value(), zp.value()};
}

inline cplx zeta_em(cplx s) { return zeta_with_derivative(s).zeta; }

// ------------------------------------------------------ Riemann-Siegel Z

// theta(t) = t/2 log(t/2pi) - t/2 - pi/8 + 1/(48t) + 7/(5760 t^3) + ...
// Asymptotic series; accurate to ~1e-13 for t >= 10.
inline double siegel_theta(double t) {
  require(t >= 10.0, errc::domain, "siegel_theta: asymptotic valid for t >= 10");
  const double u = t / kTwoPi;
  const double t2 = t * t;
  return 0.5 * t * std::log(u) - 0.5 * t - kPi / 8.0 + 1.0 / (48.0 * t) +
         7.0 / (5760.0 * t * t2) + 31.0 / (80640.0 * t * t2 * t2) +
         127.0 / (430080.0 * t * t2 * t2 * t2);
}

namespace detail {

// Taylor coefficients of the entire function Psi about 0 (order 64), plus
// the derivative polynomials needed by C1..C3.  Built once in long double.
struct psi_expansion {
  static constexpr int kOrder = 64;
  // deriv_coeff[d][i] = coefficient of z^i in Psi^(d)(z), for the orders
  // used by the correction terms.
  std::array<std::vector<double>, 10> deriv_coeff;

  psi_expansion() {
    // Taylor coefficients by Cauchy integrals over |z| = R.  Power-series
    // division by cos(pi z) is ruled out: its error recurrence grows like
    // the sec(pi z) coefficients, i.e. 2^k, which wrecks the high orders.
    // On the circle the defining ratio is well-conditioned (the denominator
    // zeros sit at real half-integers, never near |z| = 2), and the
    // trapezoid rule is spectrally accurate for this analytic integrand.
    constexpr int kNodes = 1024;
    const long double pi = 3.14159265358979323846264338327950288L;
    const long double R = 2.0L;
    std::array<std::complex<long double>, kNodes> ring;
    for (int i = 0; i < kNodes; ++i) {
      const long double th = 2.0L * pi * i / kNodes;
      const std::complex<long double> z(R * std::cos(th), R * std::sin(th));
      ring[std::size_t(i)] = std::cos(pi * (0.5L * z * z + 0.375L)) /
                             std::cos(pi * z);
    }
    std::array<long double, kOrder + 1> psi{};
    long double Rk = 1.0L;
    for (int k = 0; k <= kOrder; ++k) {
      std::complex<long double> acc(0.0L, 0.0L);
      for (int i = 0; i < kNodes; ++i) {
        const long double th = 2.0L * pi * k * i / kNodes;
        acc += ring[std::size_t(i)] *
               std::complex<long double>(std::cos(th), -std::sin(th));
      }
      // Psi is even and real: odd coefficients are pure quadrature noise.
      psi[std::size_t(k)] = (k % 2) ? 0.0L : acc.real() / (kNodes * Rk);
      Rk *= R;
    }
    for (int d = 0; d <= 9; ++d) {
      auto& out = deriv_coeff[std::size_t(d)];
      out.assign(std::size_t(kOrder - d + 1), 0.0);
      for (int j = d; j <= kOrder; ++j) {
        long double f = 1.0L;
        for (int i = 0; i < d; ++i) f *= (j - i);
        out[std::size_t(j - d)] = double(psi[std::size_t(j)] * f);
      }
    }
  }

  double deriv(int d, double z) const {
    const auto& c = deriv_coeff[std::size_t(d)];
    double v = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) v = v * z + c[i];
    return v;
  }
};

inline const psi_expansion& psi_series() {
  static const psi_expansion p;
  return p;
}

// EM engine below this height, Riemann-Siegel above.
inline constexpr double kRsSwitch = 500.0;

inline double Z_euler_maclaurin(double t) {
  const cplx z = zeta_with_derivative(cplx(0.5, t)).zeta;
  const double th = siegel_theta(t);
  const cplx w = cplx(std::cos(th), std::sin(th)) * z;
  return w.real();
}

inline double Z_riemann_siegel(double t) {
  const double a = std::sqrt(t / kTwoPi);
  const std::int64_t m = std::int64_t(a);
  const double z = 2.0 * (a - double(m)) - 1.0;
  const double th = siegel_theta(t);
  kahan_sum main;
  for (std::int64_t n = 1; n <= m; ++n) {
    const double L = log_n(n);
    main.add(std::cos(th - t * L) / std::sqrt(double(n)));
  }
  const auto& psi = psi_series();
  const double pi2 = kPi * kPi;
  const double C0 = psi.deriv(0, z);
  const double C1 = -psi.deriv(3, z) / (12.0 * pi2);
  const double C2 =
      psi.deriv(2, z) / (16.0 * pi2) + psi.deriv(6, z) / (288.0 * pi2 * pi2);
  const double C3 = -psi.deriv(1, z) / (32.0 * pi2) -
                    psi.deriv(5, z) / (120.0 * pi2 * pi2) -
                    psi.deriv(9, z) / (10368.0 * pi2 * pi2 * pi2);
  const double ra = 1.0 / a;
  const double corr = ((C3 * ra + C2) * ra + C1) * ra + C0;
  const double sign = (m % 2) ? 1.0 : -1.0;  // (-1)^{m-1}
  return 2.0 * main.value() + sign * corr / std::sqrt(a);
}

}  // namespace detail

// Hardy's Z(t): real, with Z(gamma) = 0 exactly at zero ordinates.
inline double Z(double t) {
  require(t >= 10.0, errc::domain, "Z: supported for t >= 10");
  return (t < detail::kRsSwitch) ? detail::Z_euler_maclaurin(t)
                                 : detail::Z_riemann_siegel(t);
}

// Riemann-von Mangoldt main term (T/2pi) log(T/2pi e) + 7/8.
inline double counting_main_term(double T) {
  require(T > 0.0, errc::domain, "counting_main_term: T must be positive");
  const double u = T / kTwoPi;
  return u * std::log(u / std::exp(1.0)) + 7.0 / 8.0;
}

// --------------------------------------------------------------- ZeroTable

inline constexpr double kSimplicityFloor = 1e-6;

struct ZeroTable {
  std::string kind = "zeta";  // "zeta" | "dirichlet:q=..,chi=.." | "external"
  std::string source = "computed";  // "computed" | "imported"
  double precision = 1e-9;
  std::vector<double> gamma;
  // Companion values; entries are NaN when absent.
  std::vector<cplx> zeta_prime;
  std::vector<cplx> zeta_2rho;
  // Indices whose |zeta'(rho)| fell below the simplicity floor.
  std::vector<std::size_t> flagged;

  std::size_t size() const { return gamma.size(); }
  double max_gamma() const { return gamma.empty() ? 0.0 : gamma.back(); }
  bool has_companions() const {
    return !zeta_prime.empty() && !std::isnan(zeta_prime.front().real());
  }
};

inline cplx compute_zeta_prime(double gamma) {
  return zeta_with_derivative(cplx(0.5, gamma)).zeta_prime;
}

inline cplx compute_zeta_at_one_plus(double gamma) {
  return zeta_em(cplx(1.0, 2.0 * gamma));
}

namespace detail {

inline double scan_step(double t) {
  // ~1/32 of the local mean zero gap 2pi/log(t/2pi), capped at 1/4.
  const double lg = std::max(1.0, std::log(t / kTwoPi));
  return std::min(0.25, kTwoPi / lg / 32.0);
}

inline double refine_zero(double lo, double hi, double zlo, double tol) {
  // Plain bisection: deterministic and immune to the flat spots near
  // Lehmer-type close pairs.
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double zm = Z(mid);
    if ((zlo < 0.0) == (zm < 0.0)) {
      lo = mid;
      zlo = zm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Sign-scan (a, b] with the given step; append refined zeros.
inline void scan_interval(double a, double b, double step, double tol,
                          std::vector<double>& out) {
  double t = a, zt = Z(t);
  while (t < b) {
    const double t2 = std::min(b, t + step);
    const double z2 = Z(t2);
    if ((zt < 0.0) != (z2 < 0.0))
      out.push_back(refine_zero(t, t2, zt, tol));
    t = t2;
    zt = z2;
  }
}

}  // namespace detail

// Verify a sorted ordinate list against the Riemann-von Mangoldt count:
// at midpoints between consecutive zeros, |n - main(T)| <= 1 + 0.14 log T.
// Returns the index of the first offending gap, or size() when consistent.
inline std::size_t rvm_first_violation(const std::vector<double>& g) {
  for (std::size_t n = 0; n <= g.size(); ++n) {
    double mid;
    if (n == 0)
      mid = 0.5 * (10.0 + g.front());
    else if (n == g.size())
      mid = g.back() + 1e-4;
    else
      mid = 0.5 * (g[n - 1] + g[n]);
    const double dev = std::abs(double(n) - counting_main_term(mid));
    if (dev > 1.0 + 0.14 * std::log(mid)) return n == 0 ? 0 : n - 1;
  }
  return g.size() + 1;
}

// First `count` zero ordinates with optional companion values.
inline ZeroTable compute_zeros(std::size_t count, double tolerance = 1e-9,
                               bool with_companions = true) {
  require(count >= 1, errc::domain, "compute_zeros: count must be >= 1");
  require(count <= 100000, errc::resource,
          "compute_zeros: zeros beyond index 1e5 are out of scope");
  require(tolerance >= 1e-12 && tolerance <= 1e-2, errc::domain,
          "compute_zeros: tolerance outside [1e-12, 1e-2]");

  std::vector<double> zeros;
  zeros.reserve(count + 8);
  double t = 10.0, zt = Z(t);
  while (zeros.size() < count) {
    const double step = detail::scan_step(t);
    const double t2 = t + step;
    const double z2 = Z(t2);
    if ((zt < 0.0) != (z2 < 0.0))
      zeros.push_back(detail::refine_zero(t, t2, zt, tolerance));
    t = t2;
    zt = z2;
  }

  // Count verification with escalating rescans of any offending gap.
  for (int attempt = 0;; ++attempt) {
    const std::size_t bad = rvm_first_violation(
        std::vector<double>(zeros.begin(), zeros.begin() + std::ptrdiff_t(count)));
    if (bad > count) break;
    require(attempt < 4, errc::precision,
            "compute_zeros: zero count check failed near t = " +
                format_full(zeros[std::min(bad, zeros.size() - 1)]));
    const double lo = (bad == 0) ? 10.0 : zeros[bad - 1] + tolerance;
    const double hi = (bad + 1 < zeros.size()) ? zeros[bad + 1] : zeros[bad] + 2.0;
    std::vector<double> extra;
    detail::scan_interval(lo, hi,
                          detail::scan_step(hi) / std::pow(8.0, attempt + 1),
                          tolerance, extra);
    for (double g : extra) {
      bool known = false;
      for (double z : zeros)
        if (std::abs(z - g) < 4.0 * tolerance) known = true;
      if (!known) zeros.push_back(g);
    }
    std::sort(zeros.begin(), zeros.end());
    require(zeros.size() >= count, errc::precision,
            "compute_zeros: lost zeros during rescan");
  }
  zeros.resize(count);

  ZeroTable table;
  table.kind = "zeta";
  table.source = "computed";
  table.precision = tolerance;
  table.gamma = std::move(zeros);
  const double nan = std::nan("");
  table.zeta_prime.assign(count, cplx(nan, nan));
  table.zeta_2rho.assign(count, cplx(nan, nan));
  if (with_companions) {
    for (std::size_t i = 0; i < count; ++i) {
      const double g = table.gamma[i];
      table.zeta_prime[i] = compute_zeta_prime(g);
      table.zeta_2rho[i] = compute_zeta_at_one_plus(g);
      if (std::abs(table.zeta_prime[i]) < kSimplicityFloor)
        table.flagged.push_back(i);
    }
  }
  return table;
}

// ------------------------------------------------------ counting helpers

inline std::size_t counting_function(const ZeroTable& t, double T) {
  require(T >= 0.0, errc::domain, "counting_function: T must be >= 0");
  require(T <= t.max_gamma(), errc::coverage,
          "counting_function: T beyond table coverage");
  return std::size_t(std::upper_bound(t.gamma.begin(), t.gamma.end(), T) -
                     t.gamma.begin());
}

inline std::size_t short_interval_count(const ZeroTable& t, double T) {
  require(T >= 0.0, errc::domain, "short_interval_count: T must be >= 0");
  require(T + 1.0 <= t.max_gamma(), errc::coverage,
          "short_interval_count: [T, T+1] beyond table coverage");
  const auto lo = std::upper_bound(t.gamma.begin(), t.gamma.end(), T);
  const auto hi = std::upper_bound(t.gamma.begin(), t.gamma.end(), T + 1.0);
  return std::size_t(hi - lo);
}

// ------------------------------------------------------------ file format

// Zero-table text format:
//   # kind=zeta
//   # count=<N>
//   # precision=<eps>
//   n,gamma,re_zeta_prime,im_zeta_prime,re_zeta_2rho,im_zeta_2rho
// Companion fields may be empty.
inline void export_zeros(const ZeroTable& t, const std::string& path) {
  std::ofstream out(path);
  require(out.good(), errc::resource, "export_zeros: cannot open " + path);
  out << "# kind=" << t.kind << "\n";
  out << "# count=" << t.size() << "\n";
  out << "# precision=" << format_full(t.precision) << "\n";
  auto field = [](double v) { return std::isnan(v) ? std::string() : format_full(v); };
  for (std::size_t i = 0; i < t.size(); ++i) {
    out << (i + 1) << ',' << format_full(t.gamma[i]) << ','
        << field(t.zeta_prime[i].real()) << ',' << field(t.zeta_prime[i].imag())
        << ',' << field(t.zeta_2rho[i].real()) << ','
        << field(t.zeta_2rho[i].imag()) << '\n';
  }
  require(out.good(), errc::resource, "export_zeros: write failed for " + path);
}

inline ZeroTable import_zeros(const std::string& path,
                              const std::string& expected_kind = "") {
  std::ifstream in(path);
  require(in.good(), errc::format, "import_zeros: cannot open " + path);
  ZeroTable t;
  t.source = "imported";
  std::string line;
  std::size_t lineno = 0, declared = 0;
  bool have_kind = false, have_count = false, have_precision = false;
  auto fail = [&](const std::string& msg) -> void {
    throw error(errc::format,
                path + ":" + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string body = line.substr(1);
      const auto eq = body.find('=');
      if (eq == std::string::npos) fail("malformed header line");
      std::string key = body.substr(0, eq), value = body.substr(eq + 1);
      key.erase(0, key.find_first_not_of(" \t"));
      key.erase(key.find_last_not_of(" \t") + 1);
      if (key == "kind") {
        t.kind = value;
        have_kind = true;
      } else if (key == "count") {
        declared = std::size_t(parse_double(value, "count header"));
        have_count = true;
      } else if (key == "precision") {
        t.precision = parse_double(value, "precision header");
        have_precision = true;
      } else {
        fail("unknown header key '" + key + "'");
      }
      continue;
    }
    // Data row.
    try {
      std::vector<std::string> fields;
      std::string f;
      std::istringstream row(line);
      while (std::getline(row, f, ',')) fields.push_back(f);
      while (fields.size() < 6) fields.emplace_back();
      if (fields.size() != 6) fail("expected 6 comma-separated fields");
      const double n = parse_double(fields[0], "index field");
      if (std::size_t(n) != t.gamma.size() + 1) fail("index out of sequence");
      const double g = parse_double(fields[1], "gamma field");
      // Zero tables are strictly increasing; external sequences may carry
      // repeated frequencies, so only forbid decreases while parsing.
      if (!t.gamma.empty() && g < t.gamma.back())
        fail("ordinates must not decrease");
      auto opt = [&](const std::string& s) {
        return s.empty() ? std::nan("") : parse_double(s, "companion field");
      };
      t.gamma.push_back(g);
      t.zeta_prime.emplace_back(opt(fields[2]), opt(fields[3]));
      t.zeta_2rho.emplace_back(opt(fields[4]), opt(fields[5]));
    } catch (const error& e) {
      if (e.code() != errc::format) throw;
      const std::string what = e.what();
      if (what.rfind(path + ":", 0) == 0) throw;  // already has line context
      fail(what);
    }
  }
  lineno = 0;
  if (!have_kind || !have_count || !have_precision)
    throw error(errc::format, path + ": missing required header line");
  if (t.kind == "zeta") {
    for (std::size_t i = 1; i < t.gamma.size(); ++i)
      if (t.gamma[i] <= t.gamma[i - 1])
        throw error(errc::format,
                    path + ": zeta ordinates must strictly increase (row " +
                        std::to_string(i + 1) + ")");
  }
  if (declared != t.gamma.size())
    throw error(errc::format,
                path + ": count header (" + std::to_string(declared) +
                    ") does not match " + std::to_string(t.gamma.size()) +
                    " data rows");
  if (!expected_kind.empty() && t.kind != expected_kind)
    throw error(errc::format, path + ": kind '" + t.kind +
                                  "' does not match requested '" +
                                  expected_kind + "'");
  return t;
}

}  // namespace pnerr::zeta
