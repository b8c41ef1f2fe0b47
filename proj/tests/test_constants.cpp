// Barnes G, the arithmetic factor a(z), the constants a and b, divisor
// coefficients, and zero moments with their conjectured leading terms.
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "pnerr/constants.hpp"
#include "pnerr/zeta.hpp"

using pnerr::errc;
using pnerr::error;
using pnerr::constants::a_of_z;
using pnerr::constants::barnes_g;
using pnerr::constants::constant_a;
using pnerr::constants::constant_b;
using pnerr::constants::d_half;
using pnerr::constants::divisor_coeffs;
using pnerr::constants::glaisher;
using pnerr::constants::moment_sum;
using pnerr::constants::MomentKind;
using pnerr::constants::zeta_prime_neg1;

namespace {

const pnerr::zeta::ZeroTable& table100() {
  static const pnerr::zeta::ZeroTable t =
      pnerr::zeta::compute_zeros(100, 1e-9, true);
  return t;
}

double rel(double got, double want) {
  return std::abs(got - want) / std::abs(want);
}

}  // namespace

TEST_CASE("Glaisher constant and zeta'(-1)") {
  CHECK(rel(glaisher(), 1.2824271291006226369) < 1e-11);
  CHECK(std::abs(zeta_prime_neg1() - (-0.16542114370045093)) < 1e-12);
}

TEST_CASE("Barnes G reference values and closed forms") {
  // G(1) = G(2) = G(3) = 1 and G(4) = Gamma(3) G(3) = 2.
  CHECK(std::abs(barnes_g(1.0) - 1.0) < 1e-13);
  CHECK(std::abs(barnes_g(2.0) - 1.0) < 1e-13);
  CHECK(std::abs(barnes_g(3.0) - 1.0) < 1e-12);
  CHECK(rel(barnes_g(4.0), 2.0) < 1e-12);

  CHECK(rel(barnes_g(0.25), 0.29375596533860995472) < 1e-11);
  CHECK(rel(barnes_g(0.5), 0.60324428120944620619) < 1e-11);
  CHECK(rel(barnes_g(1.5), 1.0692226492664129495) < 1e-11);
  CHECK(rel(barnes_g(2.5), 0.94757390108382577688) < 1e-11);
  CHECK(rel(barnes_g(3.5), 1.2596482574951921441) < 1e-11);
  CHECK(rel(barnes_g(3.75), 1.537358522860001557) < 1e-11);

  // G(3/2) = A^{-3/2} pi^{1/4} e^{1/8} 2^{1/24}.
  const double closed = std::pow(glaisher(), -1.5) * std::pow(pnerr::kPi, 0.25) *
                        std::exp(0.125) * std::pow(2.0, 1.0 / 24.0);
  CHECK(rel(barnes_g(1.5), closed) < 1e-8);

  CHECK_THROWS_AS(barnes_g(0.0), error);
  CHECK_THROWS_AS(barnes_g(-1.0), error);
  CHECK_THROWS_AS(barnes_g(4.5), error);
  try {
    barnes_g(4.5);
  } catch (const error& e) {
    CHECK(e.code() == errc::domain);
  }
}

TEST_CASE("Barnes G satisfies the Gamma recurrence") {
  // G(z+1) = Gamma(z) G(z) across the direct window.
  for (int i = 0; i < 20; ++i) {
    const double z = 0.5 + 2.5 * (double(i) + 0.5) / 20.0;
    const double lhs = barnes_g(z + 1.0);
    const double rhs = std::tgamma(z) * barnes_g(z);
    CHECK(rel(lhs, rhs) < 1e-8);
  }
}

TEST_CASE("arithmetic factor a(z): closed values and convergence") {
  // z = 0: every local factor is exactly 1.
  CHECK(a_of_z(0.0, 2000).value == 1.0);

  // z = 1: the local factor telescopes to 1 for every prime.
  CHECK(std::abs(a_of_z(1.0, 100000).value - 1.0) < 1e-10);
  CHECK(std::abs(a_of_z(1.0, 50000).value - a_of_z(1.0, 100000).value) < 1e-6);

  // z = 2 and z = -1 both telescope to prod (1 - p^{-2}) -> 6/pi^2;
  // truncation keeps the value slightly above the limit.
  const auto a2 = a_of_z(2.0, 100000);
  const double six_over_pi2 = 6.0 / (pnerr::kPi * pnerr::kPi);
  CHECK(rel(a2.value, six_over_pi2) < 3e-6);
  CHECK(a2.value > six_over_pi2);
  CHECK(a2.log_tail < 1e-5);
  CHECK(rel(a_of_z(-1.0, 100000).value, a2.value) < 1e-12);

  // z = -1/2, the exponent entering the constant a.
  CHECK(std::abs(a_of_z(-0.5, 200000).value - 0.91848841064365042) < 5e-7);

  // Extending the prime range multiplies in factors below 1, so the
  // partial products decrease monotonically.
  double prev = 2.0;
  for (std::int64_t P = 1000; P <= 32000; P *= 2) {
    const double v = a_of_z(-0.5, P).value;
    CHECK(v < prev);
    CHECK(v > 0.0);
    prev = v;
  }

  CHECK_THROWS_AS(a_of_z(0.5, 100), error);
  CHECK_THROWS_AS(a_of_z(0.5, 2000, 5), error);
  // Divergent-looking local factor: terms still growing at the cap.
  try {
    a_of_z(6.0, 1000, 10);
    FAIL("expected precision error");
  } catch (const error& e) {
    CHECK(e.code() == errc::precision);
  }
}

TEST_CASE("constant a matches its documented value") {
  const auto a = constant_a(100000);
  CHECK(std::abs(a.value - 0.16712) < 5e-5);
  CHECK(std::abs(a.value - 0.1671206484417531) < 1e-5);
  CHECK(a.log_tail < 1e-6);

  // Doubling the prime limit moves the value by well under 1e-6.
  CHECK(std::abs(constant_a(20000).value - constant_a(10000).value) < 1e-6);

  // Exact identity: the product prefactor equals G^2(3/2)/(2 pi), so
  // a = (1/2pi) G^2(3/2) a(-1/2).
  const double pref = std::exp(3.0 * zeta_prime_neg1() -
                               (11.0 / 12.0) * std::log(2.0)) /
                      std::sqrt(pnerr::kPi);
  const double g32 = barnes_g(1.5);
  CHECK(rel(pref, g32 * g32 / pnerr::kTwoPi) < 1e-9);

  CHECK_THROWS_AS(constant_a(5000), error);
}

TEST_CASE("divisor coefficients d_{1/2}") {
  const auto d = d_half(1000);
  REQUIRE(d.size() == 1001);
  CHECK(d[1] == 1.0);
  CHECK(d[2] == 0.5);
  CHECK(d[3] == 0.5);
  CHECK(d[4] == 0.375);
  CHECK(d[6] == 0.25);
  CHECK(d[8] == 0.3125);
  CHECK(d[9] == 0.375);
  CHECK(d[12] == 0.1875);
  CHECK(d[1000] == 25.0 / 256.0);  // 1000 = 2^3 5^3, d(p^3) = 5/16.

  for (int n = 1; n <= 1000; ++n) {
    CHECK(d[std::size_t(n)] > 0.0);
    CHECK(d[std::size_t(n)] <= 1.0);
  }

  // Dirichlet square root: (d_{1/2} * d_{1/2})(n) = 1, exactly in
  // binary floating point since every d value is dyadic.
  int bad = 0;
  for (int n = 1; n <= 1000; ++n) {
    double conv = 0.0;
    for (int m = 1; m <= n; ++m)
      if (n % m == 0) conv += d[std::size_t(m)] * d[std::size_t(n / m)];
    if (conv != 1.0) ++bad;
  }
  CHECK(bad == 0);

  // Hand-checked partial sum of d_{1/2}(n)/n^2 over n <= 10.
  const double hand = 1.0 + 0.5 / 4.0 + 0.5 / 9.0 + 0.375 / 16.0 +
                      0.5 / 25.0 + 0.25 / 36.0 + 0.5 / 49.0 +
                      0.3125 / 64.0 + 0.375 / 81.0 + 0.25 / 100.0;
  const auto d10 = d_half(10);
  double got = 0.0;
  for (int n = 1; n <= 10; ++n) got += d10[std::size_t(n)] / double(n * n);
  CHECK(std::abs(got - hand) < 1e-14);

  // The full series sums to sqrt(zeta(2)); truncation undershoots.
  const auto big = d_half(100000);
  pnerr::kahan_sum s;
  for (int n = 1; n <= 100000; ++n)
    s.add(big[std::size_t(n)] / (double(n) * double(n)));
  const double sqrt_zeta2 = 1.2825498301618640955;
  CHECK(std::abs(s.value() - sqrt_zeta2) < 5e-6);
  CHECK(s.value() < sqrt_zeta2);

  // d_1(n) = 1 for all n.
  const auto ones = divisor_coeffs(1.0, 50);
  for (int n = 1; n <= 50; ++n) CHECK(ones[std::size_t(n)] == 1.0);

  CHECK_THROWS_AS(divisor_coeffs(0.5, 0), error);
  CHECK_THROWS_AS(divisor_coeffs(0.5, 200000001), error);
}

TEST_CASE("constant b ties a to the d-series") {
  const auto b = constant_b(20000, 100000);
  CHECK(std::abs(b.value - 0.21434055927551104) < 1e-5);
  CHECK(b.tail_estimate == 1e-5);

  const double a = constant_a(20000).value;
  const double ratio = b.value / a;
  CHECK(ratio > 1.0);
  CHECK(ratio < pnerr::kPi * pnerr::kPi / 6.0);

  // Doubling n_limit shifts b by well under 1e-6.
  CHECK(std::abs(constant_b(20000, 200000).value - b.value) < 1e-6);

  CHECK_THROWS_AS(constant_b(20000, 500), error);
}

TEST_CASE("moment sums over the zero table") {
  const auto& t = table100();
  const double Tmax = t.max_gamma();  // gamma_100 ~ 236.52
  const std::vector<double> grid{15.0, 30.0, 50.0, 100.0, Tmax};

  // J_0(T) counts zeros exactly.
  const auto j0 = moment_sum(MomentKind::J, 0.0, t, grid);
  REQUIRE(j0.values.size() == 5);
  CHECK(j0.values[0] == 1.0);
  CHECK(j0.values[1] == 3.0);
  CHECK(j0.values[2] == 10.0);
  CHECK(j0.values[3] == 29.0);
  CHECK(j0.values[4] == 100.0);

  // J_{-1/2}: positive, nondecreasing, and within a factor ~2 of the
  // conjectured leading term already at T ~ 236.
  const auto jm = moment_sum(MomentKind::J, -0.5, t, grid);
  for (std::size_t i = 0; i < jm.values.size(); ++i) {
    CHECK(jm.values[i] > 0.0);
    if (i) CHECK(jm.values[i] >= jm.values[i - 1]);
    CHECK(jm.predicted[i] > 0.0);
  }
  const double jm_ratio = jm.values.back() / jm.predicted.back();
  CHECK(jm_ratio > 0.5);
  CHECK(jm_ratio < 2.0);

  // K_2: the prediction collapses to (T - 2pi)/2pi up to the truncated
  // zeta(2) factor, and the empirical ratio is O(1).
  const auto k2 = moment_sum(MomentKind::K, 2.0, t, grid);
  for (std::size_t i = 1; i < k2.values.size(); ++i)
    CHECK(k2.values[i] >= k2.values[i - 1]);
  CHECK(rel(k2.predicted.back(), (Tmax - pnerr::kTwoPi) / pnerr::kTwoPi) <
        1e-4);
  const double k2_ratio = k2.values.back() / k2.predicted.back();
  CHECK(k2_ratio > 0.3);
  CHECK(k2_ratio < 3.0);

  // Guards.
  const auto bare = pnerr::zeta::compute_zeros(10, 1e-9, false);
  try {
    moment_sum(MomentKind::J, 0.0, bare, {14.5});
    FAIL("expected dependency error");
  } catch (const error& e) {
    CHECK(e.code() == errc::dependency);
  }
  CHECK_THROWS_AS(moment_sum(MomentKind::J, 0.0, t, {30.0, 15.0}), error);
  CHECK_THROWS_AS(moment_sum(MomentKind::J, 0.0, t, {1e5}), error);
  CHECK_THROWS_AS(moment_sum(MomentKind::K, 3.0, t, {15.0}), error);
  CHECK_THROWS_AS(moment_sum(MomentKind::K, 1.0, t, {5.0, 15.0}), error);
  CHECK_THROWS_AS(moment_sum(MomentKind::J, -1.6, t, {15.0}), error);
}
