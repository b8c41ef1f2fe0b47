// Min-kernel double sums, unit-window integrals, partial-summation
// tails, and decay-exponent fits.
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "pnerr/coeffs.hpp"
#include "pnerr/meng.hpp"
#include "pnerr/quadrature.hpp"
#include "pnerr/zeta.hpp"

using pnerr::errc;
using pnerr::error;
using pnerr::coeffs::CoefficientSequence;
using pnerr::coeffs::SeqKind;
using pnerr::meng::decay_fit;
using pnerr::meng::double_sum;
using pnerr::meng::meng_report;
using pnerr::meng::MengReport;
using pnerr::meng::tail_sums;
using pnerr::meng::window_integral;
using cplx = std::complex<double>;

namespace {

const pnerr::zeta::ZeroTable& table100() {
  static const pnerr::zeta::ZeroTable t =
      pnerr::zeta::compute_zeros(100, 1e-9, true);
  return t;
}

CoefficientSequence custom(const std::vector<double>& lams,
                           const std::vector<cplx>& rs) {
  CoefficientSequence s;
  s.kind = SeqKind::custom;
  for (std::size_t i = 0; i < lams.size(); ++i) {
    s.lambda.push_back(lams[i]);
    s.r.push_back(rs[i]);
    s.modulus.push_back(std::abs(rs[i]));
    s.beta.push_back(std::arg(rs[i]));
  }
  return s;
}

// lambda_n = n, r_n = 1/n.
CoefficientSequence harmonic(std::size_t N) {
  CoefficientSequence s;
  s.kind = SeqKind::custom;
  for (std::size_t n = 1; n <= N; ++n) {
    s.lambda.push_back(double(n));
    s.r.emplace_back(1.0 / double(n), 0.0);
    s.modulus.push_back(1.0 / double(n));
    s.beta.push_back(0.0);
  }
  return s;
}

}  // namespace

TEST_CASE("double sum: closed cases and guards") {
  const auto one = custom({5.0}, {cplx(1.0, 0.0)});
  CHECK(double_sum(one, 2.0, 5.0) == 1.0);

  // Two terms at distance 2, unit moduli: diagonal 2, off-diagonal 2*(1/2).
  const auto two = custom({5.0, 7.0}, {cplx(1.0, 0.0), cplx(1.0, 0.0)});
  std::int64_t pc = 0;
  CHECK(double_sum(two, 2.0, 7.0, &pc) == 3.0);
  CHECK(pc == 4);

  // Sub-unit gap saturates the min at 1; distance 3 contributes 1/3.
  const auto close = custom({1.0, 1.5}, {cplx(1.0, 0.0), cplx(1.0, 0.0)});
  CHECK(double_sum(close, 0.5, 1.5) == 4.0);
  const auto far = custom({1.0, 4.0}, {cplx(1.0, 0.0), cplx(1.0, 0.0)});
  CHECK(std::abs(double_sum(far, 0.5, 4.0) - (2.0 + 2.0 / 3.0)) < 1e-15);

  // Coincident frequencies use the diagonal convention min := 1.
  const auto coin = custom({3.0, 3.0}, {cplx(1.0, 0.0), cplx(2.0, 0.0)});
  CHECK(double_sum(coin, 1.0, 3.0) == 9.0);

  // Empty window and empty sequence.
  const auto three = custom({5.0, 7.0, 20.0},
                            {cplx(1.0, 0.0), cplx(1.0, 0.0), cplx(1.0, 0.0)});
  CHECK(double_sum(three, 8.0, 15.0) == 0.0);
  CHECK(double_sum(CoefficientSequence{}, 1.0, 2.0) == 0.0);

  CHECK_THROWS_AS(double_sum(two, 7.0, 7.0), error);
  try {
    double_sum(two, 2.0, 8.0);
    FAIL("expected coverage error");
  } catch (const error& e) {
    CHECK(e.code() == errc::coverage);
  }
  // 10001 in-range terms exceed the 1e8 pair guard.
  CoefficientSequence big;
  big.kind = SeqKind::custom;
  for (int n = 1; n <= 10001; ++n) {
    big.lambda.push_back(0.5 * n);
    big.r.emplace_back(1.0, 0.0);
    big.modulus.push_back(1.0);
    big.beta.push_back(0.0);
  }
  try {
    double_sum(big, 0.1, 5000.5);
    FAIL("expected resource error");
  } catch (const error& e) {
    CHECK(e.code() == errc::resource);
  }
}

TEST_CASE("window integral: closed cases, quadrature, majorization") {
  // Single term: |r e^{iy lambda}|^2 integrates to |r|^2 on a unit window.
  const auto one = custom({5.0}, {cplx(1.0, 0.0)});
  CHECK(window_integral(one, 2.0, 5.0, 0.0) == 1.0);
  CHECK(window_integral(one, 2.0, 5.0, 17.3) == 1.0);
  const auto onec = custom({5.0}, {cplx(0.5, 0.3)});
  CHECK(std::abs(window_integral(onec, 2.0, 5.0, 1.0) - 0.34) < 1e-15);
  CHECK(window_integral(CoefficientSequence{}, 1.0, 2.0, 0.0) == 0.0);

  // 20-term sequence against brute Simpson quadrature of |S(y)|^2.
  std::vector<double> lams;
  std::vector<cplx> rs;
  for (int n = 1; n <= 20; ++n) {
    lams.push_back(0.9 * n);
    rs.push_back(std::polar(1.0 / double(n), 0.7 * n));
  }
  const auto seq = custom(lams, rs);
  for (double V : {0.0, 2.3}) {
    const double closed = window_integral(seq, 0.5, 18.0, V);
    const double brute = pnerr::simpson(
        [&](double y) {
          cplx s(0.0, 0.0);
          for (int n = 0; n < 20; ++n)
            s += rs[std::size_t(n)] *
                 std::polar(1.0, y * lams[std::size_t(n)]);
          return std::norm(s);
        },
        V, V + 1.0, 1e-4);
    CHECK(std::abs(closed - brute) < 1e-6);
    CHECK(closed >= 0.0);
    // Pairwise majorization: W <= 2 D (and a fortiori <= 4 D).
    const double D = double_sum(seq, 0.5, 18.0);
    CHECK(closed <= 2.0 * D + 1e-12);
  }
}

TEST_CASE("tail sums over available data") {
  const auto h = harmonic(10000);

  const auto ts = tail_sums(h, 10.0, 2.0, 2.0, 0.9);
  // tail1 = sum_{n>10} n^{-2}, truncated at n = 1e4.
  CHECK(std::abs(ts.tail1 - 0.0951663356816857) < 2e-4);
  CHECK(ts.a_admissible);
  CHECK(ts.b_admissible);
  // b = 2 reduces tail2 to the plain coefficient-square tail.
  pnerr::kahan_sum direct;
  for (int n = 11; n <= 10000; ++n) direct.add(1.0 / (double(n) * double(n)));
  CHECK(std::abs(ts.tail2 - direct.value()) < 1e-12);

  // Out-of-range exponents: computed anyway, flagged.
  const auto bad = tail_sums(h, 10.0, 0.8, 0.5, 0.9);
  CHECK_FALSE(bad.a_admissible);
  CHECK_FALSE(bad.b_admissible);
  CHECK(bad.tail1 > 0.0);
  CHECK(bad.tail2 > 0.0);

  // T above the table maximum: empty tails.
  const auto empty = tail_sums(h, 20000.0, 2.0, 2.0);
  CHECK(empty.tail1 == 0.0);
  CHECK(empty.tail2 == 0.0);
}

TEST_CASE("decay fit: engineered power law and degenerate input") {
  // lambda_n = n^2, r_n = n^{-3/2}: the diagonal dominates and
  // D(T) ~ sum_{n^2 > T} n^{-3} ~ 1/(2T), so the fitted slope is -1.
  CoefficientSequence s;
  s.kind = SeqKind::custom;
  for (int n = 1; n <= 200; ++n) {
    s.lambda.push_back(double(n) * double(n));
    const double m = std::pow(double(n), -1.5);
    s.r.emplace_back(m, 0.0);
    s.modulus.push_back(m);
    s.beta.push_back(0.0);
  }
  const auto rep =
      meng_report(s, {50.0, 100.0, 200.0, 400.0}, 40000.0, 2.0, 1.0);
  CHECK(std::abs(rep.decay_exponent + 1.0) < 0.05);
  CHECK(rep.fit_rms < 0.05);
  CHECK_FALSE(rep.flat);
  CHECK(rep.predicted_exponent == -0.9);  // -(2 - 1.0 - 0.1)

  // Constant sums: zero slope, flagged flat.
  MengReport flat;
  flat.T_grid = {1.0, 2.0, 4.0, 8.0};
  flat.double_sums = {3.0, 3.0, 3.0, 3.0};
  CHECK(decay_fit(flat) == 0.0);
  CHECK(flat.flat);

  MengReport short_grid;
  short_grid.T_grid = {1.0, 2.0, 4.0};
  short_grid.double_sums = {1.0, 0.5, 0.25};
  CHECK_THROWS_AS(decay_fit(short_grid), error);

  MengReport missing;
  missing.T_grid = {1.0, 2.0, 4.0, 8.0};
  try {
    decay_fit(missing);
    FAIL("expected dependency error");
  } catch (const error& e) {
    CHECK(e.code() == errc::dependency);
  }

  MengReport negative;
  negative.T_grid = {1.0, 2.0, 4.0, 8.0};
  negative.double_sums = {1.0, 0.5, -0.2, 0.1};
  CHECK_THROWS_AS(decay_fit(negative), error);

  MengReport unsorted;
  unsorted.T_grid = {1.0, 4.0, 2.0, 8.0};
  unsorted.double_sums = {1.0, 0.5, 0.6, 0.2};
  CHECK_THROWS_AS(decay_fit(unsorted), error);
}

TEST_CASE("meng report on the mertens sequence") {
  const auto& t = table100();
  const auto m =
      pnerr::coeffs::build_sequence(pnerr::coeffs::SeqKind::mertens, t);
  const auto rep =
      meng_report(m, {30.0, 60.0, 120.0, 180.0}, t.max_gamma(), 2.0, 1.0);

  REQUIRE(rep.double_sums.size() == 4);
  // 97 zeros lie in (30, gamma_100].
  CHECK(rep.pair_counts[0] == 97 * 97);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(rep.double_sums[i] > 0.0);
    CHECK(rep.window_integrals[i] >= 0.0);
    CHECK(rep.window_integrals[i] <= 2.0 * rep.double_sums[i]);
    if (i) {
      // Shrinking index set: both quantities decrease on this fixture.
      CHECK(rep.double_sums[i] < rep.double_sums[i - 1]);
      CHECK(rep.window_integrals[i] < rep.window_integrals[i - 1]);
    }
  }
  CHECK(rep.decay_exponent < -1.0);
  CHECK(rep.decay_exponent > -2.5);
  CHECK(rep.theta_used == 1.0);
  CHECK(rep.predicted_exponent == -0.9);

  // theta feeds straight into the predicted exponent.
  const auto rep2 =
      meng_report(m, {30.0, 60.0, 120.0, 180.0}, t.max_gamma(), 2.0, 0.8);
  CHECK(std::abs(rep2.predicted_exponent + 1.1) < 1e-15);

  CHECK_THROWS_AS(meng_report(m, {}, t.max_gamma(), 2.0, 1.0), error);
}
