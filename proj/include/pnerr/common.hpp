// Shared infrastructure: error taxonomy, compensated summation, least-squares
// helpers, evaluation grids, numeric formatting, and a deterministic tiled
// reduction that gives bit-identical results for any worker-thread count.
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace pnerr {

// ---------------------------------------------------------------- constants

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;
inline constexpr double kLog2Pi = 1.83787706640934548356065947281123527;
// Meissel-Mertens constant, stored at the precision used by the reference
// tables this project reproduces.
inline constexpr double kMeisselMertens = 0.26149721284764;
// exp() overflow guard: beyond this the result is not representable, so
// callers clamp and raise instead of silently returning inf.
inline constexpr double kExpArgLimit = 700.0;

// ------------------------------------------------------------------- errors

enum class errc {
  domain,      // argument outside the documented domain
  resource,    // would exceed a memory/cost guard
  format,      // malformed input file or config
  precision,   // could not reach the requested tolerance
  accuracy,    // tail/truncation estimate exceeds the requested tolerance
  coverage,    // data (zeros, samples) do not cover the requested range
  dependency,  // missing companion values or required prior stage
  usage,       // CLI misuse
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::domain: return "domain_error";
    case errc::resource: return "resource_error";
    case errc::format: return "format_error";
    case errc::precision: return "precision_error";
    case errc::accuracy: return "accuracy_error";
    case errc::coverage: return "coverage_error";
    case errc::dependency: return "dependency_error";
    case errc::usage: return "usage_error";
  }
  return "error";
}

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg),
        code_(code) {}
  errc code() const { return code_; }

 private:
  errc code_;
};

inline void require(bool cond, errc code, const std::string& msg) {
  if (!cond) throw error(code, msg);
}

// -------------------------------------------------------- compensated sums

// Neumaier's variant of Kahan summation: robust when terms exceed the
// running sum in magnitude.
struct kahan_sum {
  double s = 0.0;
  double c = 0.0;

  void add(double x) {
    double t = s + x;
    if (std::abs(s) >= std::abs(x))
      c += (s - t) + x;
    else
      c += (x - t) + s;
    s = t;
  }
  double value() const { return s + c; }
};

// ------------------------------------------------------------ linear model

struct linear_fit_result {
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
  std::size_t n = 0;
};

// Ordinary least squares y ~ slope*x + intercept.
inline linear_fit_result linear_fit(const std::vector<double>& xs,
                                    const std::vector<double>& ys) {
  require(xs.size() == ys.size(), errc::domain, "linear_fit: length mismatch");
  require(xs.size() >= 2, errc::domain, "linear_fit: need at least 2 points");
  const std::size_t n = xs.size();
  kahan_sum sx, sy;
  for (std::size_t i = 0; i < n; ++i) {
    sx.add(xs[i]);
    sy.add(ys[i]);
  }
  const double mx = sx.value() / double(n), my = sy.value() / double(n);
  kahan_sum sxx, sxy;
  for (std::size_t i = 0; i < n; ++i) {
    sxx.add((xs[i] - mx) * (xs[i] - mx));
    sxy.add((xs[i] - mx) * (ys[i] - my));
  }
  require(sxx.value() > 0.0, errc::domain, "linear_fit: degenerate abscissae");
  linear_fit_result r;
  r.slope = sxy.value() / sxx.value();
  r.intercept = my - r.slope * mx;
  r.n = n;
  kahan_sum sr2;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = ys[i] - (r.slope * xs[i] + r.intercept);
    sr2.add(e * e);
  }
  r.rms_residual = std::sqrt(sr2.value() / double(n));
  return r;
}

// -------------------------------------------------------------------- grids

// Geometric grid lo, lo*ratio, ... capped at hi (hi always included).
inline std::vector<double> geometric_grid(double lo, double hi,
                                          double ratio = 1.01) {
  require(lo > 0.0 && hi >= lo, errc::domain, "geometric_grid: need 0 < lo <= hi");
  require(ratio > 1.0, errc::domain, "geometric_grid: ratio must exceed 1");
  std::vector<double> g;
  for (double x = lo; x < hi; x *= ratio) g.push_back(x);
  g.push_back(hi);
  return g;
}

inline std::vector<double> linear_grid(double lo, double hi, double step) {
  require(step > 0.0 && hi >= lo, errc::domain, "linear_grid: bad range/step");
  std::vector<double> g;
  // Index-based generation avoids accumulated drift over long ranges.
  const std::size_t n = std::size_t(std::floor((hi - lo) / step + 1e-9));
  g.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i) g.push_back(lo + double(i) * step);
  return g;
}

// -------------------------------------------------------------- formatting

// Shortest digit string that round-trips a double (17 significant digits).
inline std::string format_full(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline double parse_double(const std::string& s, const char* what) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  require(end && *end == '\0' && end != s.c_str(), errc::format,
          std::string("bad numeric field in ") + what + ": '" + s + "'");
  return v;
}

// ------------------------------------------------------------------ hashing

// FNV-1a, used for input digests in run manifests.
inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t h = 1469598103934665603ull) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

// ---------------------------------------------------------------- threading

namespace detail {
inline std::atomic<int>& thread_cap() {
  static std::atomic<int> cap{1};
  return cap;
}
}  // namespace detail

inline void set_max_threads(int n) {
  require(n >= 1, errc::domain, "thread count must be >= 1");
  detail::thread_cap().store(n);
}
inline int max_threads() { return detail::thread_cap().load(); }

// Deterministic tiled reduction: the index range is cut into fixed-size
// tiles, each tile is summed with compensation, and tile results are
// combined in index order.  The value is therefore independent of how many
// worker threads execute the tiles.
template <class F>
double reduce_tiled(std::int64_t n, F&& per_index,
                    std::int64_t tile = std::int64_t(1) << 14) {
  if (n <= 0) return 0.0;
  const std::int64_t ntiles = (n + tile - 1) / tile;
  std::vector<double> partial(std::size_t(ntiles), 0.0);
  auto run_tile = [&](std::int64_t ti) {
    kahan_sum acc;
    const std::int64_t lo = ti * tile;
    const std::int64_t hi = std::min(n, lo + tile);
    for (std::int64_t i = lo; i < hi; ++i) acc.add(per_index(i));
    partial[std::size_t(ti)] = acc.value();
  };
  const int nt = std::min<std::int64_t>(max_threads(), ntiles);
  if (nt <= 1) {
    for (std::int64_t ti = 0; ti < ntiles; ++ti) run_tile(ti);
  } else {
    std::atomic<std::int64_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(std::size_t(nt));
    for (int w = 0; w < nt; ++w)
      pool.emplace_back([&] {
        for (std::int64_t ti = next.fetch_add(1); ti < ntiles;
             ti = next.fetch_add(1))
          run_tile(ti);
      });
    for (auto& th : pool) th.join();
  }
  kahan_sum total;
  for (double v : partial) total.add(v);
  return total.value();
}

}  // namespace pnerr
