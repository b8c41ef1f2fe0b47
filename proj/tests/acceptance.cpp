// Acceptance suite: twelve end-to-end checks across the library, one
// pass/fail line each.  Tolerances and budgets are pinned as named
// constants next to each criterion.  Exit status 0 only when all pass.
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "oracles.hpp"
#include "pnerr/coeffs.hpp"
#include "pnerr/common.hpp"
#include "pnerr/constants.hpp"
#include "pnerr/explicit_sum.hpp"
#include "pnerr/meng.hpp"
#include "pnerr/quadrature.hpp"
#include "pnerr/random_model.hpp"
#include "pnerr/sieve.hpp"
#include "pnerr/zeta.hpp"

using namespace pnerr;
using coeffs::CoefficientSequence;
using coeffs::SeqKind;
using sieve::SummatoryKind;

namespace {

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double secs() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

std::string fmt(const char* f, ...) {
  char buf[256];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

int g_passed = 0, g_total = 0;

template <class F>
void run(int id, const char* label, F&& body) {
  Timer tm;
  bool pass = false;
  std::string detail;
  try {
    auto [p, d] = body();
    pass = p;
    detail = d;
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  ++g_total;
  if (pass) ++g_passed;
  std::printf("[%2d] %s %-26s %6.1fs  %s\n", id, pass ? "PASS" : "FAIL",
              label, tm.secs(), detail.c_str());
  std::fflush(stdout);
}

zeta::ZeroTable slice(const zeta::ZeroTable& t, std::size_t n) {
  zeta::ZeroTable out = t;
  out.gamma.resize(n);
  if (out.zeta_prime.size() > n) out.zeta_prime.resize(n);
  if (out.zeta_2rho.size() > n) out.zeta_2rho.resize(n);
  std::vector<std::size_t> kept;
  for (std::size_t i : out.flagged)
    if (i < n) kept.push_back(i);
  out.flagged = kept;
  return out;
}

CoefficientSequence truncate_seq(const CoefficientSequence& s, std::size_t n) {
  CoefficientSequence out = s;
  out.lambda.resize(n);
  out.r.resize(n);
  out.modulus.resize(n);
  out.beta.resize(n);
  return out;
}

std::vector<double> geometric_points(double lo, double hi, int n) {
  std::vector<double> g(std::size_t(n), 0.0);
  const double q = std::pow(hi / lo, 1.0 / double(n - 1));
  double v = lo;
  for (int i = 0; i < n; ++i, v *= q) g[std::size_t(i)] = v;
  g.back() = hi;
  return g;
}

// [1] Segmented sieve against trial division: integer summatories agree
// exactly; the psi accumulation agrees to rounding noise.
std::pair<bool, std::string> criterion1() {
  constexpr double kPsiTol = 1e-8;  // |psi sums| ~ 1e4; order-of-add noise
  constexpr double kBudget = 5.0;
  Timer tm;
  const std::int64_t N = 10000;
  // Evaluation points start at 2 (the summatory API's lower edge); the
  // n = 1 contribution is folded into the running oracle sums.
  std::vector<double> xs(std::size_t(N - 1), 0.0);
  for (std::int64_t n = 2; n <= N; ++n) xs[std::size_t(n - 2)] = double(n);
  auto mm = sieve::summatory({SummatoryKind::mertens_M, 0, 0}, N, xs);
  auto ll = sieve::summatory({SummatoryKind::liouville_L, 0, 0}, N, xs);
  auto pp = sieve::summatory({SummatoryKind::psi, 0, 0}, N, xs);
  std::int64_t accM = 1, accL = 1, bad = 0;  // mu(1) = liouville(1) = 1
  double accP = 0.0, worstP = 0.0;
  for (std::int64_t n = 2; n <= N; ++n) {
    accM += oracle::mu(n);
    accL += oracle::liouville(n);
    accP += oracle::von_mangoldt(n);
    const std::size_t i = std::size_t(n - 2);
    if (mm.raw[i] != double(accM) || ll.raw[i] != double(accL)) ++bad;
    worstP = std::max(worstP, std::abs(pp.raw[i] - accP));
  }
  const bool anchors = mm.raw[8] == -1.0 && ll.raw[8] == 0.0 &&
                       mm.raw[998] == 2.0;
  const double t = tm.secs();
  const bool pass = bad == 0 && worstP < kPsiTol && anchors && t < kBudget;
  return {pass, fmt("mismatches=%lld max|dpsi|=%.1e M(10)=%g L(10)=%g "
                    "M(1000)=%g",
                    static_cast<long long>(bad), worstP, mm.raw[8], ll.raw[8],
                    mm.raw[998])};
}

// [2] Zero-table integrity: the counting function stays within 2 of its
// smooth main term throughout, and the first ordinate hits its reference.
std::pair<bool, std::string> criterion2() {
  constexpr double kGamma1 = 14.134725142;
  constexpr double kGamma1Tol = 1e-8;
  constexpr double kCountTol = 2.0;
  constexpr double kBudget = 60.0;
  Timer tm;
  const auto t = zeta::compute_zeros(2000, 1e-9, false);
  const double g1dev = std::abs(t.gamma[0] - kGamma1);
  double worst = 0.0;
  for (std::size_t n = 1; n <= t.size(); ++n) {
    const double m = zeta::counting_main_term(t.gamma[n - 1]);
    worst = std::max(worst, std::abs(double(n) - m));
    worst = std::max(worst, std::abs(double(n - 1) - m));
  }
  const double secs = tm.secs();
  const bool pass = g1dev < kGamma1Tol && worst < kCountTol && secs < kBudget;
  return {pass, fmt("gamma1_dev=%.1e max|N-main|=%.3f", g1dev, worst)};
}

// [3] Mertens residual window: with 2000 zeros the normalized explicit-sum
// residual stays below 1 across [2, 50]; halving to 500 zeros makes the
// worst residual strictly larger.
std::pair<bool, std::string> criterion3(const zeta::ZeroTable& fixture) {
  constexpr double kResTol = 1.0;
  constexpr double kBudget = 120.0;
  Timer tm;
  const auto t2000 = slice(fixture, 2000);
  const auto seq = coeffs::build_sequence(SeqKind::mertens, t2000);
  const auto xs = linear_grid(2.05, 49.95, 0.1);
  auto table = sieve::summatory({SummatoryKind::mertens_M, 0, 0}, 51, xs);
  sieve::normalize(table);
  const explicit_sum::ExplicitSum es_full{
      seq, seq.max_lambda(), explicit_sum::default_constant(seq.kind)};
  const explicit_sum::ExplicitSum es_half{
      seq, t2000.gamma[499], explicit_sum::default_constant(seq.kind)};
  double worst_full = 0.0, worst_half = 0.0;
  for (double x : xs) {
    worst_full =
        std::max(worst_full, std::abs(explicit_sum::residual(es_full, table, x)));
    worst_half =
        std::max(worst_half, std::abs(explicit_sum::residual(es_half, table, x)));
  }
  const bool pass = worst_full < kResTol && worst_half > worst_full &&
                    tm.secs() < kBudget;
  return {pass, fmt("max|res|(2000)=%.3f max|res|(500)=%.3f", worst_full,
                    worst_half)};
}

// [4] Psi residual at sample points: with 2000 zeros the normalized
// residual (smooth term subtracted) is below 0.15 at three half-integers.
std::pair<bool, std::string> criterion4(const zeta::ZeroTable& fixture) {
  constexpr double kResTol = 0.15;
  constexpr double kBudget = 60.0;
  Timer tm;
  const auto t2000 = slice(fixture, 2000);
  const auto seq = coeffs::build_sequence(SeqKind::psi, t2000);
  const std::vector<double> xs = {100.5, 500.5, 1000.5};
  auto table = sieve::summatory({SummatoryKind::psi, 0, 0}, 1001, xs);
  sieve::normalize(table);
  const explicit_sum::ExplicitSum es{
      seq, seq.max_lambda(), explicit_sum::default_constant(seq.kind)};
  double worst = 0.0;
  for (double x : xs)
    worst = std::max(worst, std::abs(explicit_sum::residual(es, table, x)));
  const bool pass = worst < kResTol && tm.secs() < kBudget;
  return {pass, fmt("max|res|=%.4f over x={100.5,500.5,1000.5}", worst)};
}

// [5] The long-run time average of exp(s F) matches the independent-phase
// model prod I_0(s |r_n|) for the five-zero mertens truncation.
std::pair<bool, std::string> criterion5(const CoefficientSequence& mertens) {
  constexpr double kRelTol = 0.03;
  constexpr double kTmax = 1e6;
  constexpr double kBudget = 300.0;
  Timer tm;
  const auto seq5 = truncate_seq(mertens, 5);
  const double T = seq5.max_lambda();
  double worst = 0.0;
  for (double s : {1.0, 2.0}) {
    const double emp = explicit_sum::empirical_laplace(seq5, s, T, kTmax);
    const double prod = random_model::mgf_product(seq5, s, T);
    worst = std::max(worst, std::abs(emp - prod) / prod);
  }
  const bool pass = worst < kRelTol && tm.secs() < kBudget;
  return {pass, fmt("max rel dev=%.2e over s={1,2}", worst)};
}

// [6] Every cosine product moment of size <= 4 over the first five
// frequencies time-averages to its independent-phase expectation.
std::pair<bool, std::string> criterion6(const CoefficientSequence& mertens) {
  constexpr double kTol = 2e-3;
  constexpr double kTmax = 1e6;
  constexpr double kBudget = 300.0;
  Timer tm;
  const auto seq5 = truncate_seq(mertens, 5);
  double worst = 0.0;
  int count = 0;
  auto eval = [&](const std::vector<std::size_t>& idx) {
    const auto cm = explicit_sum::cosine_moment(seq5, idx, kTmax);
    worst = std::max(worst,
                     std::abs(cm.time_average - cm.random_expectation));
    ++count;
  };
  for (std::size_t a = 0; a < 5; ++a) {
    eval({a});
    for (std::size_t b = a; b < 5; ++b) {
      eval({a, b});
      for (std::size_t c = b; c < 5; ++c) {
        eval({a, b, c});
        for (std::size_t d = c; d < 5; ++d) eval({a, b, c, d});
      }
    }
  }
  const bool pass = worst < kTol && count == 125 && tm.secs() < kBudget;
  return {pass, fmt("max|avg-expect|=%.2e over %d multisets", worst, count)};
}

// [7] Bessel layer: the I_0 power series matches direct quadrature of the
// integral representation; both analytic lower bounds hold on (0, 30].
std::pair<bool, std::string> criterion7() {
  constexpr double kSeriesTol = 1e-9;
  constexpr double kEps = 0.5;
  double worst = 0.0;
  for (double t : {0.5, 1.0, 2.0, 5.0, 10.0}) {
    const double series = random_model::detail::i0_series(t);
    const double integral =
        simpson([t](double th) { return std::exp(t * std::cos(th)); }, 0.0,
                kPi, 1e-3) /
        kPi;
    worst = std::max(worst, std::abs(series / integral - 1.0));
  }
  bool bounds = true;
  for (int k = 1; k <= 100; ++k) {
    const auto b = random_model::i0_lower_bounds(0.3 * k, kEps);
    bounds = bounds && b.eps_holds && b.lamzouri_holds;
  }
  const bool pass = worst < kSeriesTol && bounds;
  return {pass, fmt("max series/integral dev=%.1e bounds_hold=%s", worst,
                    bounds ? "yes" : "no")};
}

// [8] Constants layer: a hits its reference digits, the b pipeline is
// stable under doubled truncations, and Barnes G satisfies its recurrence.
std::pair<bool, std::string> criterion8() {
  constexpr double kARef = 0.16712;
  constexpr double kATol = 5e-5;
  constexpr double kBTol = 1e-6;
  constexpr double kRecTol = 1e-8;
  const auto a = constants::constant_a(100000);
  const auto b1 = constants::constant_b(100000, 100000);
  const auto b2 = constants::constant_b(200000, 200000);
  double worst_rec = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double z = 0.5 + 2.5 * (i + 0.5) / 20.0;
    const double lhs = constants::barnes_g(z + 1.0);
    const double rhs = std::tgamma(z) * constants::barnes_g(z);
    worst_rec = std::max(worst_rec, std::abs(lhs - rhs) / std::abs(lhs));
  }
  const double adev = std::abs(a.value - kARef);
  const double bmove = std::abs(b1.value - b2.value);
  const bool pass = adev < kATol && bmove < kBTol && worst_rec < kRecTol;
  return {pass, fmt("a=%.7f b_move=%.1e barnes_rec=%.1e", a.value, bmove,
                    worst_rec)};
}

// [9] Fejer layer: kernel mass is 1 up to the windowing tail, and
// smoothing a single active frequency reproduces the triangular transform.
std::pair<bool, std::string> criterion9() {
  constexpr double kSingleTol = 1e-6;
  const double m1 = explicit_sum::kernel_mass(10.0, 100.0);
  const double m2 = explicit_sum::kernel_mass(100.0, 100.0);
  const bool mass_ok = std::abs(m1 - 1.0) <= 2.0 / (10.0 * 100.0) &&
                       std::abs(m2 - 1.0) <= 2.0 / (100.0 * 100.0);
  CoefficientSequence s;
  s.kind = SeqKind::custom;
  s.lambda = {5.0, 30.0};  // the high partner only extends coverage
  s.r = {{1.0, 0.0}, {1.0, 0.0}};
  s.modulus = {1.0, 1.0};
  s.beta = {0.0, 0.0};
  const double T = 8.0, Z = 4e5, Y = 8.0, t = 1.3;
  const auto sm = explicit_sum::fejer_smooth(s, t, T, Z, Y);
  const double analytic =
      explicit_sum::fejer_hat(5.0 / T) * std::cos(5.0 * t);
  const double sdev = std::abs(sm.value - analytic);
  const bool pass = mass_ok && sdev < kSingleTol;
  return {pass, fmt("|mass-1|={%.1e,%.1e} single_freq_dev=%.1e",
                    std::abs(m1 - 1.0), std::abs(m2 - 1.0), sdev)};
}

// [10] Pair-interaction double sum over the mertens sequence decays in T,
// and each unit window integral is majorized by 4x the double sum.
std::pair<bool, std::string> criterion10(const CoefficientSequence& mertens) {
  constexpr double kSlopeMax = -0.5;
  constexpr double kMajorization = 4.0;
  const std::vector<double> grid = {50.0, 100.0, 200.0, 400.0};
  const auto rep = meng::meng_report(mertens, grid, mertens.max_lambda(), 2.0,
                                     1.0);
  bool decreasing = true, majorized = true;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (i > 0 && rep.double_sums[i] >= rep.double_sums[i - 1])
      decreasing = false;
    if (rep.window_integrals[i] > kMajorization * rep.double_sums[i])
      majorized = false;
  }
  const bool pass =
      decreasing && majorized && rep.decay_exponent < kSlopeMax;
  return {pass, fmt("slope=%.3f decreasing=%s W<=4D=%s", rep.decay_exponent,
                    decreasing ? "yes" : "no", majorized ? "yes" : "no")};
}

// [11] The empirical distribution of the truncated cosine sum over a long
// time window matches the random-phase model in Kolmogorov-Smirnov.
std::pair<bool, std::string> criterion11(const zeta::ZeroTable& fixture,
                                         const CoefficientSequence& mertens) {
  constexpr double kKsTol = 0.05;
  constexpr std::size_t kSamples = 1000000;
  constexpr std::uint64_t kSeed = 1;
  const double T30 = fixture.gamma[29];
  const auto ta = random_model::time_average_distribution(mertens, T30, 1.0,
                                                          1e6, 1.0);
  const auto mc = random_model::sample_Xr(mertens, 30, kSamples, kSeed);
  const double ks = random_model::compare_distributions(ta, mc);
  const bool pass = ks < kKsTol;
  return {pass, fmt("ks=%.4f terms=30 samples=%zu", ks, kSamples)};
}

// [12] Growth fits across the full table land in their expected windows:
// the S0 log-power A near 5/4 (mertens) and 2 (psi), with theta below 2.
std::pair<bool, std::string> criterion12(const zeta::ZeroTable& fixture,
                                         const CoefficientSequence& mertens,
                                         const CoefficientSequence& psi) {
  constexpr double kMertensALo = 1.0, kMertensAHi = 1.5;
  constexpr double kPsiALo = 1.8, kPsiAHi = 2.2;
  constexpr double kThetaMax = 2.0;
  const auto grid = geometric_points(20.0, fixture.max_gamma(), 40);
  const auto fm = coeffs::fit_assumptions(mertens, grid);
  const auto fp = coeffs::fit_assumptions(psi, grid);
  const bool pass = fm.A >= kMertensALo && fm.A <= kMertensAHi &&
                    fp.A >= kPsiALo && fp.A <= kPsiAHi &&
                    fm.theta < kThetaMax && fp.theta < kThetaMax;
  return {pass, fmt("A_mertens=%.3f A_psi=%.3f theta={%.3f,%.3f}", fm.A,
                    fp.A, fm.theta, fp.theta)};
}

}  // namespace

int main() {
  std::printf("pnerr acceptance suite\n");
  Timer ft;
  const auto fixture = zeta::compute_zeros(10000, 1e-9, true);
  const auto seq_mertens = coeffs::build_sequence(SeqKind::mertens, fixture);
  const auto seq_psi = coeffs::build_sequence(SeqKind::psi, fixture);
  std::printf("fixture: %zu zeros with companions (%.1fs)\n", fixture.size(),
              ft.secs());

  run(1, "sieve-vs-trial-division", [] { return criterion1(); });
  run(2, "zero-count-integrity", [] { return criterion2(); });
  run(3, "mertens-residual-window", [&] { return criterion3(fixture); });
  run(4, "psi-residual-points", [&] { return criterion4(fixture); });
  run(5, "laplace-product-match", [&] { return criterion5(seq_mertens); });
  run(6, "cosine-moment-match", [&] { return criterion6(seq_mertens); });
  run(7, "bessel-layer", [] { return criterion7(); });
  run(8, "constants-layer", [] { return criterion8(); });
  run(9, "fejer-layer", [] { return criterion9(); });
  run(10, "meng-double-sum-decay", [&] { return criterion10(seq_mertens); });
  run(11, "random-model-ks", [&] { return criterion11(fixture, seq_mertens); });
  run(12, "assumption-fits",
      [&] { return criterion12(fixture, seq_mertens, seq_psi); });

  std::printf("RESULT: %d/%d criteria passed\n", g_passed, g_total);
  return g_passed == g_total ? 0 : 1;
}
