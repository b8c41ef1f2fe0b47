// Segmented sieves and summatory functions for the arithmetical error terms.
//
// Supported summatory kinds and their normalizations E(x):
//   psi               (psi(x) - x) / sqrt(x)         psi(x) = sum_{p^k <= x} log p
//   theta             (theta(x) - x) / sqrt(x)       theta(x) = sum_{p <= x} log p
//   mertens_M         M(x) / sqrt(x)                 M(x) = sum_{n <= x} mu(n)
//   liouville_L       L(x) / sqrt(x)                 L(x) = sum_{n <= x} lambda(n)
//   prime_reciprocal  sqrt(x) log(x) * (sum_{p <= x} 1/p - log log x - M)
//   pi_qa             (log x / sqrt(x)) * (pi(x;q,a) - pi(x)/phi(q))
//
// All raw values are exact: integer counts for M, L and pi, compensated log
// sums for psi/theta.  Sieving is segmented (2^20 entries per segment) so the
// memory footprint is independent of the limit; a hard guard rejects limits
// beyond 10^9.
#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "pnerr/common.hpp"

namespace pnerr::sieve {

inline constexpr std::int64_t kMaxLimit = 1'000'000'000;
inline constexpr std::int64_t kSegment = std::int64_t(1) << 20;

// ------------------------------------------------------------ prime basics

inline std::vector<std::uint32_t> primes_upto(std::int64_t n) {
  require(n >= 0, errc::domain, "primes_upto: negative limit");
  std::vector<std::uint32_t> out;
  if (n < 2) return out;
  std::vector<bool> comp(std::size_t(n) + 1, false);
  for (std::int64_t p = 2; p * p <= n; ++p)
    if (!comp[std::size_t(p)])
      for (std::int64_t m = p * p; m <= n; m += p) comp[std::size_t(m)] = true;
  for (std::int64_t p = 2; p <= n; ++p)
    if (!comp[std::size_t(p)]) out.push_back(std::uint32_t(p));
  return out;
}

inline std::int64_t totient(std::int64_t q) {
  require(q >= 1, errc::domain, "totient: q must be >= 1");
  std::int64_t result = q, m = q;
  for (std::int64_t p = 2; p * p <= m; ++p)
    if (m % p == 0) {
      while (m % p == 0) m /= p;
      result -= result / p;
    }
  if (m > 1) result -= result / m;
  return result;
}

// ----------------------------------------------------------- segment walks

namespace detail {

inline void check_limit(std::int64_t limit) {
  require(limit >= 1, errc::domain, "sieve: limit must be >= 1");
  require(limit <= kMaxLimit, errc::resource,
          "sieve: limit exceeds the 1e9 memory guard");
}

// Visit(n, mu, lambda) for every n in [1, limit] in increasing order.
// mu in {-1,0,1}; lambda in {-1,1}.
template <class Visit>
void walk_multiplicative(std::int64_t limit, Visit&& visit) {
  check_limit(limit);
  const std::int64_t root = std::int64_t(std::sqrt(double(limit))) + 1;
  const auto ps = primes_upto(root);
  std::vector<std::uint64_t> rem(static_cast<std::size_t>(kSegment));
  std::vector<std::uint8_t> omega(static_cast<std::size_t>(kSegment));   // Omega(n), with multiplicity
  std::vector<std::uint8_t> nu(static_cast<std::size_t>(kSegment));      // omega(n), distinct
  std::vector<std::uint8_t> sqfree(static_cast<std::size_t>(kSegment));
  for (std::int64_t lo = 1; lo <= limit; lo += kSegment) {
    const std::int64_t hi = std::min(limit, lo + kSegment - 1);
    const std::size_t len = std::size_t(hi - lo + 1);
    for (std::size_t i = 0; i < len; ++i) {
      rem[i] = std::uint64_t(lo + std::int64_t(i));
      omega[i] = 0;
      nu[i] = 0;
      sqfree[i] = 1;
    }
    for (std::uint32_t p : ps) {
      const std::int64_t p64 = p;
      if (p64 > hi) break;
      std::int64_t m = ((lo + p64 - 1) / p64) * p64;
      for (; m <= hi; m += p64) {
        std::size_t i = std::size_t(m - lo);
        std::uint8_t e = 0;
        while (rem[i] % std::uint64_t(p) == 0) {
          rem[i] /= std::uint64_t(p);
          ++e;
        }
        omega[i] = std::uint8_t(omega[i] + e);
        nu[i] = std::uint8_t(nu[i] + 1);
        if (e >= 2) sqfree[i] = 0;
      }
    }
    for (std::size_t i = 0; i < len; ++i) {
      // A residual > 1 is a single prime factor exceeding sqrt(limit).
      if (rem[i] > 1) {
        omega[i] = std::uint8_t(omega[i] + 1);
        nu[i] = std::uint8_t(nu[i] + 1);
      }
      const int mu = sqfree[i] ? ((nu[i] & 1) ? -1 : 1) : 0;
      const int lambda = (omega[i] & 1) ? -1 : 1;
      visit(lo + std::int64_t(i), mu, lambda);
    }
  }
}

// Visit(p) for every prime p in [2, limit] in increasing order.
template <class Visit>
void walk_primes(std::int64_t limit, Visit&& visit) {
  check_limit(limit);
  const std::int64_t root = std::int64_t(std::sqrt(double(limit))) + 1;
  const auto ps = primes_upto(root);
  std::vector<std::uint8_t> comp(static_cast<std::size_t>(kSegment));
  for (std::int64_t lo = 2; lo <= limit; lo += kSegment) {
    const std::int64_t hi = std::min(limit, lo + kSegment - 1);
    const std::size_t len = std::size_t(hi - lo + 1);
    std::fill(comp.begin(), comp.begin() + std::ptrdiff_t(len), 0);
    for (std::uint32_t p : ps) {
      const std::int64_t p64 = p;
      if (p64 * p64 > hi) break;
      std::int64_t m = std::max(p64 * p64, ((lo + p64 - 1) / p64) * p64);
      for (; m <= hi; m += p64) comp[std::size_t(m - lo)] = 1;
    }
    for (std::size_t i = 0; i < len; ++i)
      if (!comp[i]) visit(lo + std::int64_t(i));
  }
}

}  // namespace detail

// -------------------------------------------------------------- full maps

// mu(n) for n in [1, limit]; index 0 is unused (zero).
inline std::vector<std::int8_t> sieve_mobius(std::int64_t limit) {
  detail::check_limit(limit);
  std::vector<std::int8_t> mu(std::size_t(limit) + 1, 0);
  detail::walk_multiplicative(limit, [&](std::int64_t n, int m, int) {
    mu[std::size_t(n)] = std::int8_t(m);
  });
  return mu;
}

// lambda(n) for n in [1, limit]; index 0 is unused (zero).
inline std::vector<std::int8_t> sieve_liouville(std::int64_t limit) {
  detail::check_limit(limit);
  std::vector<std::int8_t> lam(std::size_t(limit) + 1, 0);
  detail::walk_multiplicative(limit, [&](std::int64_t n, int, int l) {
    lam[std::size_t(n)] = std::int8_t(l);
  });
  return lam;
}

// ------------------------------------------------------- summatory tables

enum class SummatoryKind {
  psi,
  theta,
  mertens_M,
  liouville_L,
  prime_reciprocal,
  pi_qa,
};

struct SummatorySpec {
  SummatoryKind kind = SummatoryKind::mertens_M;
  std::int64_t q = 0;  // pi_qa only
  std::int64_t a = 0;  // pi_qa only
};

inline const char* kind_name(SummatoryKind k) {
  switch (k) {
    case SummatoryKind::psi: return "psi";
    case SummatoryKind::theta: return "theta";
    case SummatoryKind::mertens_M: return "mertens_M";
    case SummatoryKind::liouville_L: return "liouville_L";
    case SummatoryKind::prime_reciprocal: return "prime_reciprocal";
    case SummatoryKind::pi_qa: return "pi_qa";
  }
  return "?";
}

inline SummatoryKind kind_from_name(const std::string& s) {
  if (s == "psi") return SummatoryKind::psi;
  if (s == "theta") return SummatoryKind::theta;
  if (s == "mertens_M") return SummatoryKind::mertens_M;
  if (s == "liouville_L") return SummatoryKind::liouville_L;
  if (s == "prime_reciprocal") return SummatoryKind::prime_reciprocal;
  if (s == "pi_qa") return SummatoryKind::pi_qa;
  throw error(errc::domain, "unknown summatory kind '" + s + "'");
}

struct SummatoryTable {
  SummatorySpec spec;
  std::int64_t limit = 0;
  std::vector<double> xs;
  std::vector<double> raw;         // exact summatory values at floor(xs)
  std::vector<double> normalized;  // filled by normalize()
  std::vector<double> aux;         // pi(x) companion counts (pi_qa only)
};

namespace detail {

inline void check_xs(const std::vector<double>& xs, std::int64_t limit) {
  require(!xs.empty(), errc::domain, "summatory: empty evaluation grid");
  double prev = 0.0;
  for (double x : xs) {
    require(x >= 2.0, errc::domain, "summatory: evaluation points must be >= 2");
    require(x > prev, errc::domain, "summatory: evaluation points must increase");
    require(x <= double(limit), errc::domain,
            "summatory: evaluation point exceeds sieve limit");
    prev = x;
  }
}

}  // namespace detail

// Evaluate the summatory function of `spec` at every x in `xs` (increasing,
// all within [2, limit]).  The raw value at x is the sum over n <= floor(x).
inline SummatoryTable summatory(const SummatorySpec& spec, std::int64_t limit,
                                const std::vector<double>& xs) {
  detail::check_limit(limit);
  detail::check_xs(xs, limit);
  SummatoryTable t;
  t.spec = spec;
  t.limit = limit;
  t.xs = xs;
  t.raw.assign(xs.size(), 0.0);
  const std::size_t nx = xs.size();

  if (spec.kind == SummatoryKind::mertens_M ||
      spec.kind == SummatoryKind::liouville_L) {
    const bool want_mu = spec.kind == SummatoryKind::mertens_M;
    std::int64_t acc = 0;
    std::size_t j = 0;
    detail::walk_multiplicative(limit, [&](std::int64_t n, int mu, int lam) {
      acc += want_mu ? mu : lam;
      while (j < nx && std::int64_t(xs[j]) == n) t.raw[j++] = double(acc);
    });
    require(j == nx, errc::coverage, "summatory: grid not fully covered");
    return t;
  }

  if (spec.kind == SummatoryKind::pi_qa) {
    require(spec.q >= 2, errc::domain, "pi_qa: modulus q must be >= 2");
    require(spec.a >= 0 && spec.a < spec.q, errc::domain,
            "pi_qa: residue a must lie in [0, q)");
    require(std::gcd(spec.a, spec.q) == 1, errc::domain,
            "pi_qa: gcd(a, q) must be 1");
    t.aux.assign(nx, 0.0);
    std::int64_t in_class = 0, total = 0;
    std::size_t j = 0;
    auto flush = [&](std::int64_t upto) {
      // Record all thresholds whose floor is <= upto.
      while (j < nx && std::int64_t(xs[j]) <= upto) {
        t.raw[j] = double(in_class);
        t.aux[j] = double(total);
        ++j;
      }
    };
    detail::walk_primes(limit, [&](std::int64_t p) {
      flush(p - 1);
      ++total;
      if (p % spec.q == spec.a) ++in_class;
      flush(p);
    });
    flush(limit);
    return t;
  }

  // psi / theta / prime_reciprocal: prime walk with optional prime-power
  // augmentation.
  const bool is_psi = spec.kind == SummatoryKind::psi;
  const bool is_recip = spec.kind == SummatoryKind::prime_reciprocal;

  // Prime-power events (p^k, log p) for k >= 2; only psi uses them.
  struct Event {
    std::int64_t pos;
    double val;
  };
  std::vector<Event> events;
  if (is_psi) {
    const std::int64_t root = std::int64_t(std::sqrt(double(limit))) + 1;
    for (std::uint32_t p : primes_upto(root)) {
      const double lp = std::log(double(p));
      for (std::int64_t u = std::int64_t(p) * p; u <= limit;) {
        events.push_back({u, lp});
        if (u > limit / p) break;
        u *= p;
      }
    }
    std::sort(events.begin(), events.end(),
              [](const Event& a, const Event& b) { return a.pos < b.pos; });
  }

  kahan_sum acc;
  std::size_t j = 0, e = 0;
  auto flush_below = [&](std::int64_t pos) {
    while (j < nx && std::int64_t(xs[j]) < pos) t.raw[j++] = acc.value();
  };
  auto flush_at = [&](std::int64_t pos) {
    while (j < nx && std::int64_t(xs[j]) == pos) t.raw[j++] = acc.value();
  };
  auto apply_event = [&](std::int64_t pos, double val) {
    flush_below(pos);
    acc.add(val);
    flush_at(pos);
  };
  detail::walk_primes(limit, [&](std::int64_t p) {
    while (e < events.size() && events[e].pos < p) {
      apply_event(events[e].pos, events[e].val);
      ++e;
    }
    apply_event(p, is_recip ? 1.0 / double(p) : std::log(double(p)));
  });
  while (e < events.size()) {
    apply_event(events[e].pos, events[e].val);
    ++e;
  }
  while (j < nx) t.raw[j++] = acc.value();
  return t;
}

// Fill `normalized` from `raw` according to the kind's scaling.
inline void normalize(SummatoryTable& t) {
  require(t.raw.size() == t.xs.size(), errc::dependency,
          "normalize: raw values missing");
  t.normalized.assign(t.xs.size(), 0.0);
  for (std::size_t i = 0; i < t.xs.size(); ++i) {
    const double x = t.xs[i], r = t.raw[i];
    const double sx = std::sqrt(x);
    switch (t.spec.kind) {
      case SummatoryKind::psi:
      case SummatoryKind::theta:
        t.normalized[i] = (r - x) / sx;
        break;
      case SummatoryKind::mertens_M:
      case SummatoryKind::liouville_L:
        t.normalized[i] = r / sx;
        break;
      case SummatoryKind::prime_reciprocal:
        t.normalized[i] =
            sx * std::log(x) * (r - std::log(std::log(x)) - kMeisselMertens);
        break;
      case SummatoryKind::pi_qa: {
        require(!t.aux.empty(), errc::dependency,
                "normalize: pi(x) companion counts missing");
        const double phi = double(totient(t.spec.q));
        t.normalized[i] = std::log(x) / sx * (r - t.aux[i] / phi);
        break;
      }
    }
  }
}

}  // namespace pnerr::sieve
