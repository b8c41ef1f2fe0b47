// Command-line front door: subcommand routing, CSV/JSON emission, run
// manifests, and the pipeline orchestrator.
//
// Exit codes: 0 success, 2 usage error, 1 computation error.  Errors print
// one machine-parseable line on stderr:
//   pnerr-error code=<name> message="<text>"
#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "pnerr/coeffs.hpp"
#include "pnerr/common.hpp"
#include "pnerr/constants.hpp"
#include "pnerr/explicit_sum.hpp"
#include "pnerr/meng.hpp"
#include "pnerr/random_model.hpp"
#include "pnerr/sieve.hpp"
#include "pnerr/zeta.hpp"

namespace fs = std::filesystem;
namespace sieve = pnerr::sieve;
using nlohmann::json;
using pnerr::errc;
using pnerr::error;

namespace {

constexpr const char* kVersion = "0.1.0";

// ------------------------------------------------------------- tables

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;
  bool kv_object = false;  // two-column key/value table; JSON form is an object
};

std::string cell_text(const json& c) {
  if (c.is_string()) return c.get<std::string>();
  if (c.is_boolean()) return c.get<bool>() ? "true" : "false";
  if (c.is_number_integer()) return std::to_string(c.get<long long>());
  return pnerr::format_full(c.get<double>());
}

void emit_table(const Table& t, const std::string& format, std::ostream& os) {
  if (format == "json") {
    if (t.kv_object) {
      json obj = json::object();
      for (const auto& row : t.rows) obj[row[0].get<std::string>()] = row[1];
      os << obj.dump(2) << '\n';
      return;
    }
    json arr = json::array();
    for (const auto& row : t.rows) {
      json obj = json::object();
      for (std::size_t i = 0; i < t.columns.size(); ++i)
        obj[t.columns[i]] = row[i];
      arr.push_back(obj);
    }
    os << arr.dump(2) << '\n';
    return;
  }
  for (std::size_t i = 0; i < t.columns.size(); ++i)
    os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      os << (i ? "," : "") << cell_text(row[i]);
    os << '\n';
  }
}

// ---------------------------------------------------------- run context

struct RunContext {
  std::string out;
  std::string format = "csv";
  std::uint64_t seed = 1;
  std::string command;
  std::map<std::string, std::string> inputs;  // path -> digest
  json notes = json::object();
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
};

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  pnerr::require(in.good(), errc::format, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string bytes = ss.str();
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx",
                static_cast<unsigned long long>(
                    pnerr::fnv1a64(bytes.data(), bytes.size())));
  return buf;
}

void note_input(RunContext& ctx, const std::string& path) {
  ctx.inputs[path] = file_digest(path);
}

double elapsed_seconds(const RunContext& ctx) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       ctx.t0)
      .count();
}

void write_manifest(const RunContext& ctx,
                    const std::vector<std::string>& outputs,
                    const std::string& manifest_path,
                    const std::string& config_snapshot = "") {
  json m;
  m["tool"] = std::string("pnerr ") + kVersion;
  m["command"] = ctx.command;
  if (!config_snapshot.empty()) m["config"] = config_snapshot;
  m["inputs"] = json::object();
  for (const auto& [p, d] : ctx.inputs) m["inputs"][p] = d;
  m["outputs"] = json::array();
  for (const auto& p : outputs)
    m["outputs"].push_back({{"path", p}, {"digest", file_digest(p)}});
  m["seed"] = ctx.seed;
  m["format"] = ctx.format;
  m["wall_seconds"] = elapsed_seconds(ctx);
  if (!ctx.notes.empty()) m["notes"] = ctx.notes;
  std::ofstream os(manifest_path);
  pnerr::require(os.good(), errc::resource, "cannot write " + manifest_path);
  os << m.dump(2) << '\n';
}

// Emit to --out (with manifest) or stdout.
int finish(RunContext& ctx, const Table& t) {
  if (ctx.out.empty()) {
    emit_table(t, ctx.format, std::cout);
    return 0;
  }
  {
    std::ofstream os(ctx.out);
    pnerr::require(os.good(), errc::resource, "cannot write " + ctx.out);
    emit_table(t, ctx.format, os);
  }
  write_manifest(ctx, {ctx.out}, ctx.out + ".manifest.json");
  return 0;
}

// ------------------------------------------------------------- parsing

double num(const std::string& s, const char* what) {
  try {
    return pnerr::parse_double(s, what);
  } catch (const error&) {
    throw error(errc::usage,
                std::string(what) + ": bad numeric value '" + s + "'");
  }
}

std::vector<double> parse_list(const std::string& s, const char* what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    out.push_back(num(item, what));
  pnerr::require(!out.empty(), errc::usage,
                 std::string(what) + ": empty list");
  return out;
}

// "lo:hi:step" -> inclusive linear grid.
std::vector<double> parse_range(const std::string& s, const char* what) {
  const auto p1 = s.find(':');
  const auto p2 = s.rfind(':');
  pnerr::require(p1 != std::string::npos && p2 != p1, errc::usage,
                 std::string(what) + ": expected lo:hi:step, got '" + s + "'");
  const double lo = num(s.substr(0, p1), what);
  const double hi = num(s.substr(p1 + 1, p2 - p1 - 1), what);
  const double step = num(s.substr(p2 + 1), what);
  pnerr::require(step > 0.0 && hi >= lo, errc::usage,
                 std::string(what) + ": bad range '" + s + "'");
  return pnerr::linear_grid(lo, hi, step);
}

std::vector<double> geometric_points(double lo, double hi, int n) {
  pnerr::require(n >= 2 && hi > lo && lo > 0.0, errc::usage,
                 "geometric grid needs 0 < lo < hi and n >= 2");
  std::vector<double> g(static_cast<std::size_t>(n), 0.0);
  const double q = std::pow(hi / lo, 1.0 / double(n - 1));
  double v = lo;
  for (int i = 0; i < n; ++i) {
    g[std::size_t(i)] = v;
    v *= q;
  }
  g.back() = hi;
  return g;
}

// ------------------------------------------------------- zeros sourcing

// --zeros PATH loads a table file; otherwise --count N computes, going
// through the PNERR_DATA_DIR cache when that variable is set.
pnerr::zeta::ZeroTable acquire_zeros(RunContext& ctx,
                                     const std::string& zeros_path,
                                     std::int64_t count, double tol,
                                     bool companions = true) {
  if (!zeros_path.empty()) {
    note_input(ctx, zeros_path);
    return pnerr::zeta::import_zeros(zeros_path);
  }
  pnerr::require(count >= 1, errc::usage, "need --zeros PATH or --count N");
  const char* dir = std::getenv("PNERR_DATA_DIR");
  if (dir != nullptr && *dir != '\0') {
    char name[96];
    std::snprintf(name, sizeof name, "zeros-%lld-%g%s.csv",
                  static_cast<long long>(count), tol,
                  companions ? "" : "-bare");
    const fs::path cache = fs::path(dir) / name;
    if (fs::exists(cache)) {
      auto t = pnerr::zeta::import_zeros(cache.string());
      if (t.size() == std::size_t(count)) {
        note_input(ctx, cache.string());
        return t;
      }
    }
    auto t = pnerr::zeta::compute_zeros(std::size_t(count), tol, companions);
    fs::create_directories(cache.parent_path());
    pnerr::zeta::export_zeros(t, cache.string());
    note_input(ctx, cache.string());
    return t;
  }
  return pnerr::zeta::compute_zeros(std::size_t(count), tol, companions);
}

// Decimated CDF table (full resolution would be millions of rows).
Table cdf_table(const pnerr::random_model::DistributionEstimate& d,
                int points) {
  pnerr::require(!d.support.empty(), errc::domain, "empty distribution");
  Table t;
  t.columns = {"v", "cdf"};
  const std::size_t n = d.support.size();
  const std::size_t P = std::min<std::size_t>(std::size_t(points), n);
  for (std::size_t k = 0; k < P; ++k) {
    const std::size_t idx =
        (P == 1) ? n - 1
                 : std::size_t(std::llround(double(k) * double(n - 1) /
                                            double(P - 1)));
    t.rows.push_back({json(d.support[idx]), json(d.cdf[idx])});
  }
  return t;
}

sieve::SummatoryKind table_kind_for(pnerr::coeffs::SeqKind k) {
  using pnerr::coeffs::SeqKind;
  switch (k) {
    case SeqKind::psi: return sieve::SummatoryKind::psi;
    case SeqKind::mertens: return sieve::SummatoryKind::mertens_M;
    case SeqKind::liouville: return sieve::SummatoryKind::liouville_L;
    default: break;
  }
  throw error(errc::usage, "kind must be mertens, psi, or liouville here");
}

// ------------------------------------------------------------ pipeline

using Config = std::map<std::string, std::map<std::string, std::string>>;

Config parse_config(const std::string& text) {
  Config cfg;
  std::string section;
  std::istringstream ss(text);
  std::string line;
  std::size_t lineno = 0;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return std::string();
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  };
  while (std::getline(ss, line)) {
    ++lineno;
    const std::string l = trim(line);
    if (l.empty() || l[0] == '#' || l[0] == ';') continue;
    if (l.front() == '[') {
      pnerr::require(l.back() == ']' && l.size() > 2, errc::usage,
                     "config line " + std::to_string(lineno) +
                         ": malformed section header");
      section = trim(l.substr(1, l.size() - 2));
      cfg[section];
      continue;
    }
    const auto eq = l.find('=');
    pnerr::require(eq != std::string::npos && !section.empty(), errc::usage,
                   "config line " + std::to_string(lineno) +
                       ": expected key = value inside a [section]");
    cfg[section][trim(l.substr(0, eq))] = trim(l.substr(eq + 1));
  }
  return cfg;
}

std::string cfg_get(const Config& c, const std::string& sec,
                    const std::string& key, const std::string& fallback) {
  const auto s = c.find(sec);
  if (s == c.end()) return fallback;
  const auto k = s->second.find(key);
  return k == s->second.end() ? fallback : k->second;
}

std::string cfg_need(const Config& c, const std::string& sec,
                     const std::string& key) {
  const std::string v = cfg_get(c, sec, key, "");
  pnerr::require(!v.empty(), errc::usage,
                 "config: [" + sec + "] requires key '" + key + "'");
  return v;
}

// One stage = one output file + one manifest next to it.
void stage_emit(const RunContext& run, const std::string& stage,
                const fs::path& outdir, const Table& t,
                const std::string& format, const json& notes,
                const std::string& config_snapshot) {
  RunContext sc;
  sc.command = run.command + " [stage " + stage + "]";
  sc.inputs = run.inputs;
  sc.seed = run.seed;
  sc.format = format;
  sc.t0 = run.t0;
  sc.notes = notes;
  const fs::path data =
      outdir / (stage + (format == "json" ? ".json" : ".csv"));
  {
    std::ofstream os(data);
    pnerr::require(os.good(), errc::resource,
                   "cannot write " + data.string());
    emit_table(t, format, os);
  }
  write_manifest(sc, {data.string()},
                 (outdir / (stage + ".manifest.json")).string(),
                 config_snapshot);
}

int run_pipeline(RunContext& ctx, const std::string& config_path) {
  note_input(ctx, config_path);
  std::ifstream in(config_path);
  pnerr::require(in.good(), errc::usage,
                 "pipeline: cannot open config " + config_path);
  std::ostringstream raw;
  raw << in.rdbuf();
  const std::string snapshot = raw.str();
  const Config cfg = parse_config(snapshot);
  pnerr::require(!cfg.empty(), errc::usage, "pipeline: empty config");

  const fs::path outdir = ctx.out.empty() ? fs::path("pnerr-out")
                                          : fs::path(ctx.out);
  fs::create_directories(outdir);
  if (cfg.count("run") && cfg.at("run").count("seed"))
    ctx.seed = std::uint64_t(num(cfg.at("run").at("seed"), "run.seed"));

  std::vector<std::string> stages_run;
  pnerr::zeta::ZeroTable zeros;
  pnerr::coeffs::CoefficientSequence seq;
  pnerr::coeffs::AssumptionReport fit;
  bool have_zeros = false, have_seq = false, have_fit = false;

  auto need = [&](bool ok, const std::string& stage, const char* dep) {
    pnerr::require(ok, errc::dependency,
                   "stage " + stage + ": missing stage " + dep);
  };

  if (cfg.count("zeros")) {
    const auto count =
        std::int64_t(num(cfg_need(cfg, "zeros", "count"), "zeros.count"));
    const double tol = num(cfg_get(cfg, "zeros", "tol", "1e-9"), "zeros.tol");
    zeros = acquire_zeros(ctx, cfg_get(cfg, "zeros", "path", ""), count, tol);
    have_zeros = true;
    const fs::path zf = outdir / "zeros.csv";
    pnerr::zeta::export_zeros(zeros, zf.string());
    RunContext sc;
    sc.command = ctx.command + " [stage zeros]";
    sc.inputs = ctx.inputs;
    sc.seed = ctx.seed;
    sc.t0 = ctx.t0;
    write_manifest(sc, {zf.string()},
                   (outdir / "zeros.manifest.json").string(), snapshot);
    stages_run.push_back("zeros");
  }

  if (cfg.count("sequence")) {
    need(have_zeros, "sequence", "zeros");
    const auto kind =
        pnerr::coeffs::kind_from_name(cfg_need(cfg, "sequence", "kind"));
    seq = pnerr::coeffs::build_sequence(kind, zeros);
    have_seq = true;
    Table t;
    t.columns = {"n", "lambda", "modulus", "beta"};
    for (std::size_t i = 0; i < seq.size(); ++i)
      t.rows.push_back({json(std::int64_t(i + 1)), json(seq.lambda[i]),
                        json(seq.modulus[i]), json(seq.beta[i])});
    stage_emit(ctx, "sequence", outdir, t, "csv", json::object(), snapshot);
    stages_run.push_back("sequence");
  }

  if (cfg.count("residual")) {
    need(have_seq, "residual", "sequence");
    const double x_lo =
        num(cfg_get(cfg, "residual", "x_lo", "2.05"), "residual.x_lo");
    const double x_hi = num(cfg_need(cfg, "residual", "x_hi"), "residual.x_hi");
    const double step =
        num(cfg_get(cfg, "residual", "step", "0.1"), "residual.step");
    const auto xs = pnerr::linear_grid(x_lo, x_hi, step);
    sieve::SummatorySpec spec;
    spec.kind = table_kind_for(seq.kind);
    auto table =
        sieve::summatory(spec, std::int64_t(std::ceil(x_hi)) + 1, xs);
    sieve::normalize(table);
    pnerr::explicit_sum::ExplicitSum es{seq, seq.max_lambda(),
                                        pnerr::explicit_sum::default_constant(
                                            seq.kind)};
    Table t;
    t.columns = {"x", "E", "phi2", "residual"};
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double phi2 = 2.0 * pnerr::explicit_sum::phi_sum(es, xs[i]);
      t.rows.push_back(
          {json(xs[i]), json(table.normalized[i]), json(phi2),
           json(pnerr::explicit_sum::residual(es, table, xs[i]))});
    }
    stage_emit(ctx, "residual", outdir, t, "csv", json::object(), snapshot);
    stages_run.push_back("residual");
  }

  if (cfg.count("assumptions")) {
    need(have_seq, "assumptions", "sequence");
    const double lo =
        num(cfg_get(cfg, "assumptions", "grid_lo", "20"), "grid_lo");
    const double hi = num(
        cfg_get(cfg, "assumptions", "grid_hi",
                pnerr::format_full(seq.max_lambda())),
        "grid_hi");
    const int npts = int(
        num(cfg_get(cfg, "assumptions", "points", "40"), "points"));
    fit = pnerr::coeffs::fit_assumptions(seq, geometric_points(lo, hi, npts));
    have_fit = true;
    Table t;
    t.kv_object = true;
    t.columns = {"key", "value"};
    t.rows = {{json("alpha_minus"), json(fit.alpha_minus)},
              {json("alpha_plus"), json(fit.alpha_plus)},
              {json("alpha"), json(fit.alpha)},
              {json("A"), json(fit.A)},
              {json("a2_ratio"), json(fit.a2_ratio)},
              {json("a2_nonincreasing"), json(fit.a2_nonincreasing)},
              {json("theta"), json(fit.theta)},
              {json("theta_flagged"), json(fit.theta_flagged)},
              {json("kappa_minus"), json(fit.kappa_minus)},
              {json("kappa_plus"), json(fit.kappa_plus)},
              {json("max_short_count_ratio"),
               json(fit.max_short_count_ratio)},
              {json("s0_fit_rms"), json(fit.s0_fit_rms)},
              {json("s2_fit_rms"), json(fit.s2_fit_rms)},
              {json("lambda_unit"), json(fit.lambda_unit)}};
    stage_emit(ctx, "assumptions", outdir, t, "json", json::object(),
               snapshot);
    stages_run.push_back("assumptions");
  }

  if (cfg.count("random")) {
    need(have_seq, "random", "sequence");
    const auto samples = std::size_t(
        num(cfg_need(cfg, "random", "samples"), "random.samples"));
    const auto n_terms = std::size_t(num(
        cfg_get(cfg, "random", "n_terms", std::to_string(seq.size())),
        "random.n_terms"));
    if (cfg.at("random").count("seed"))
      ctx.seed = std::uint64_t(num(cfg.at("random").at("seed"), "seed"));
    const auto mc =
        pnerr::random_model::sample_Xr(seq, n_terms, samples, ctx.seed);
    json notes;
    notes["seed"] = ctx.seed;
    notes["n_terms"] = n_terms;
    if (cfg.at("random").count("t_end")) {
      const double t_end = num(cfg.at("random").at("t_end"), "t_end");
      const double step =
          num(cfg_get(cfg, "random", "step", "1.0"), "step");
      const auto ta = pnerr::random_model::time_average_distribution(
          seq, seq.lambda[n_terms - 1], 1.0, t_end, step);
      notes["ks_time_vs_mc"] =
          pnerr::random_model::compare_distributions(ta, mc);
    }
    stage_emit(ctx, "random", outdir, cdf_table(mc, 1001), "csv", notes,
               snapshot);
    stages_run.push_back("random");
  }

  if (cfg.count("constants")) {
    const auto P = std::int64_t(num(
        cfg_get(cfg, "constants", "prime_limit", "100000"), "prime_limit"));
    const auto N = std::int64_t(
        num(cfg_get(cfg, "constants", "n_limit", "100000"), "n_limit"));
    const auto a = pnerr::constants::constant_a(P);
    const auto b = pnerr::constants::constant_b(P, N);
    Table t;
    t.columns = {"name", "value", "tail_estimate"};
    t.rows = {{json("a"), json(a.value), json(a.log_tail)},
              {json("b"), json(b.value), json(b.tail_estimate)},
              {json("zeta_prime_neg1"),
               json(pnerr::constants::zeta_prime_neg1()), json(0.0)}};
    stage_emit(ctx, "constants", outdir, t, "csv", json::object(), snapshot);
    stages_run.push_back("constants");
  }

  if (cfg.count("meng")) {
    need(have_seq, "meng", "sequence");
    const auto grid =
        parse_list(cfg_need(cfg, "meng", "T_grid"), "meng.T_grid");
    const double X = num(
        cfg_get(cfg, "meng", "X", pnerr::format_full(seq.max_lambda())),
        "meng.X");
    const double V = num(cfg_get(cfg, "meng", "V", "2"), "meng.V");
    const double theta = have_fit ? fit.theta
                                  : num(cfg_get(cfg, "meng", "theta", "1"),
                                        "meng.theta");
    const auto rep = pnerr::meng::meng_report(seq, grid, X, V, theta);
    Table t;
    t.columns = {"T", "double_sum", "window_integral", "predicted_exponent"};
    for (std::size_t i = 0; i < rep.T_grid.size(); ++i)
      t.rows.push_back({json(rep.T_grid[i]), json(rep.double_sums[i]),
                        json(rep.window_integrals[i]),
                        json(rep.predicted_exponent)});
    json notes;
    notes["decay_exponent"] = rep.decay_exponent;
    notes["fit_rms"] = rep.fit_rms;
    notes["theta_used"] = rep.theta_used;
    stage_emit(ctx, "meng", outdir, t, "csv", notes, snapshot);
    stages_run.push_back("meng");
  }

  pnerr::require(!stages_run.empty(), errc::usage,
                 "pipeline: config names no known stage");
  json top;
  top["tool"] = std::string("pnerr ") + kVersion;
  top["command"] = ctx.command;
  top["config"] = snapshot;
  top["stages"] = stages_run;
  top["manifests"] = json::array();
  for (const auto& s : stages_run)
    top["manifests"].push_back((outdir / (s + ".manifest.json")).string());
  top["wall_seconds"] = elapsed_seconds(ctx);
  std::ofstream os(outdir / "pipeline.manifest.json");
  pnerr::require(os.good(), errc::resource, "cannot write pipeline manifest");
  os << top.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  RunContext ctx;
  {
    std::ostringstream cmd;
    for (int i = 0; i < argc; ++i) cmd << (i ? " " : "") << argv[i];
    ctx.command = cmd.str();
  }

  CLI::App app{"prime error-term laboratory"};
  app.set_version_flag("--version", std::string("pnerr ") + kVersion);
  app.require_subcommand(1);
  int threads = 1;
  app.add_option("--out", ctx.out, "output file (or directory for pipeline)");
  app.add_option("--threads", threads, "worker thread cap")
      ->check(CLI::Range(1, 256));
  app.add_option("--seed", ctx.seed, "RNG seed for Monte-Carlo commands");
  auto* fmt_opt =
      app.add_option("--format", ctx.format, "csv or json output")
          ->check(CLI::IsMember({"csv", "json"}));

  // zeros ------------------------------------------------------------
  auto* zeros = app.add_subcommand("zeros", "zeta-zero tables");
  zeros->require_subcommand(1);
  std::int64_t z_count = 0;
  double z_tol = 1e-9;
  bool z_bare = false;
  std::string z_path;
  auto* z_compute = zeros->add_subcommand("compute", "compute ordinates");
  z_compute->add_option("--count", z_count, "number of zeros")->required();
  z_compute->add_option("--tol", z_tol, "bisection tolerance");
  z_compute->add_flag("--no-companions", z_bare,
                      "skip zeta'(rho) and zeta(2 rho)");
  auto* z_import = zeros->add_subcommand("import", "validate and rewrite");
  z_import->add_option("path", z_path, "source table")->required();
  auto* z_export = zeros->add_subcommand("export", "write table to PATH");
  std::string z_export_path;
  z_export->add_option("path", z_export_path, "destination")->required();
  z_export->add_option("--count", z_count, "number of zeros")->required();
  z_export->add_option("--tol", z_tol, "bisection tolerance");

  // sieve ------------------------------------------------------------
  auto* sv = app.add_subcommand("sieve", "summatory functions");
  std::string sv_kind = "mertens_M", sv_points, sv_grid;
  std::int64_t sv_limit = 0, sv_q = 0, sv_a = 0;
  sv->add_option("--kind", sv_kind,
                 "psi|theta|mertens_M|liouville_L|prime_reciprocal|pi_qa");
  sv->add_option("--limit", sv_limit, "sieve limit")->required();
  sv->add_option("--points", sv_points, "comma list of x values");
  sv->add_option("--grid", sv_grid, "lo:hi:step x grid");
  sv->add_option("--q", sv_q, "modulus (pi_qa)");
  sv->add_option("--a", sv_a, "residue class (pi_qa)");

  // explicit ---------------------------------------------------------
  auto* ex = app.add_subcommand("explicit", "explicit-formula sums");
  ex->require_subcommand(1);
  std::string ex_kind = "mertens", ex_zeros;
  std::int64_t ex_count = 0;
  double ex_tol = 1e-9;
  auto add_zero_source = [&](CLI::App* sub, std::string& kind,
                             std::string& zpath, std::int64_t& cnt,
                             double& tol) {
    sub->add_option("--kind", kind, "mertens|psi|liouville");
    sub->add_option("--zeros", zpath, "zero-table CSV path");
    sub->add_option("--count", cnt, "compute this many zeros");
    sub->add_option("--tol", tol, "zero tolerance");
  };
  auto* ex_cmp = ex->add_subcommand("compare", "residual scan vs sieve");
  double ex_xmax = 50.0, ex_step = 0.1, ex_xlo = 2.05;
  add_zero_source(ex_cmp, ex_kind, ex_zeros, ex_count, ex_tol);
  ex_cmp->add_option("--xmax", ex_xmax, "scan upper end");
  ex_cmp->add_option("--xlo", ex_xlo, "scan lower end (off-integer)");
  ex_cmp->add_option("--step", ex_step, "scan step");
  auto* ex_scan = ex->add_subcommand("scan", "extreme values of F");
  double ex_T = 0.0, ex_t0 = 1.0, ex_t1 = 1000.0, ex_tstep = 0.01;
  add_zero_source(ex_scan, ex_kind, ex_zeros, ex_count, ex_tol);
  ex_scan->add_option("--T", ex_T, "frequency truncation (default max)");
  ex_scan->add_option("--t-begin", ex_t0, "scan start");
  ex_scan->add_option("--t-end", ex_t1, "scan end");
  ex_scan->add_option("--step", ex_tstep, "scan step");
  auto* ex_lap = ex->add_subcommand("laplace", "empirical Laplace transform");
  double ex_s = 1.0, ex_tmax = 1e6;
  add_zero_source(ex_lap, ex_kind, ex_zeros, ex_count, ex_tol);
  ex_lap->add_option("--s", ex_s, "transform argument");
  ex_lap->add_option("--T", ex_T, "frequency truncation (default max)");
  ex_lap->add_option("--tmax", ex_tmax, "time-average horizon");
  auto* ex_sm = ex->add_subcommand("smooth", "Fejer-smoothed value");
  double ex_st = 10.0, ex_sT = 0.0, ex_sZ = 100.0, ex_sY = 0.0;
  add_zero_source(ex_sm, ex_kind, ex_zeros, ex_count, ex_tol);
  ex_sm->add_option("--t", ex_st, "evaluation point");
  ex_sm->add_option("--T", ex_sT, "kernel scale (default max/4)");
  ex_sm->add_option("--Z", ex_sZ, "kernel width");
  ex_sm->add_option("--Y", ex_sY, "outer truncation (default max)");

  // assumptions ------------------------------------------------------
  auto* as = app.add_subcommand("assumptions", "growth-hypothesis fits");
  std::string as_kind = "mertens", as_zeros, as_grid;
  std::int64_t as_count = 0;
  double as_tol = 1e-9;
  add_zero_source(as, as_kind, as_zeros, as_count, as_tol);
  as->add_option("--grid", as_grid, "comma list of fit heights T");

  // random -----------------------------------------------------------
  auto* rn = app.add_subcommand("random", "random model");
  rn->require_subcommand(1);
  std::string rn_kind = "mertens", rn_zeros;
  std::int64_t rn_count = 0;
  double rn_tol = 1e-9;
  std::size_t rn_terms = 0, rn_samples = 100000;
  int rn_points = 1001;
  auto* rn_sample = rn->add_subcommand("sample", "Monte-Carlo X_r CDF");
  add_zero_source(rn_sample, rn_kind, rn_zeros, rn_count, rn_tol);
  rn_sample->add_option("--terms", rn_terms, "truncation (default all)");
  rn_sample->add_option("--samples", rn_samples, "sample count");
  rn_sample->add_option("--cdf-points", rn_points, "rows in the CDF output");
  auto* rn_time = rn->add_subcommand("timeavg", "time-average CDF of 2F");
  double rn_tend = 1e6, rn_tstep = 1.0;
  add_zero_source(rn_time, rn_kind, rn_zeros, rn_count, rn_tol);
  rn_time->add_option("--terms", rn_terms, "truncation (default all)");
  rn_time->add_option("--t-end", rn_tend, "horizon");
  rn_time->add_option("--step", rn_tstep, "time step");
  rn_time->add_option("--cdf-points", rn_points, "rows in the CDF output");
  auto* rn_tail = rn->add_subcommand("tail", "tail probability estimate");
  double rn_V = 1.0, rn_eps = 0.1, rn_alpha = 0.0, rn_A = 0.0;
  add_zero_source(rn_tail, rn_kind, rn_zeros, rn_count, rn_tol);
  rn_tail->add_option("--V", rn_V, "threshold")->required();
  rn_tail->add_option("--terms", rn_terms, "truncation (default all)");
  rn_tail->add_option("--samples", rn_samples, "sample count");
  rn_tail->add_option("--eps", rn_eps, "sandwich epsilon");
  rn_tail->add_option("--alpha", rn_alpha, "override fitted alpha");
  rn_tail->add_option("--A", rn_A, "override fitted A");
  auto* rn_cmp = rn->add_subcommand("dist-compare",
                                    "KS: time average vs Monte-Carlo");
  add_zero_source(rn_cmp, rn_kind, rn_zeros, rn_count, rn_tol);
  rn_cmp->add_option("--terms", rn_terms, "truncation (default all)");
  rn_cmp->add_option("--samples", rn_samples, "Monte-Carlo sample count");
  rn_cmp->add_option("--t-end", rn_tend, "time-average horizon");
  rn_cmp->add_option("--step", rn_tstep, "time step");

  // constants --------------------------------------------------------
  auto* cn = app.add_subcommand("constants", "a, b, zeta'(-1)");
  std::string cn_which;
  std::int64_t cn_P = 100000, cn_N = 100000;
  cn->add_option("which", cn_which, "a|b|zeta-prime-neg1")->required();
  cn->add_option("--prime-limit", cn_P, "Euler-product truncation");
  cn->add_option("--n-limit", cn_N, "d-series truncation (b only)");

  // moments ----------------------------------------------------------
  auto* mo = app.add_subcommand("moments", "discrete zero moments");
  std::string mo_kind = "Jk", mo_zeros, mo_grid;
  std::int64_t mo_count = 0;
  double mo_tol = 1e-9, mo_k = 0.0, mo_s = 0.0;
  mo->add_option("--kind", mo_kind, "Jk|Ks");
  mo->add_option("--k", mo_k, "J exponent");
  mo->add_option("--s", mo_s, "K exponent");
  mo->add_option("--zeros", mo_zeros, "zero-table CSV path");
  mo->add_option("--count", mo_count, "compute this many zeros");
  mo->add_option("--tol", mo_tol, "zero tolerance");
  mo->add_option("--grid", mo_grid, "comma list of T values")->required();

  // meng -------------------------------------------------------------
  auto* mg = app.add_subcommand("meng", "min-kernel double sums");
  std::string mg_kind = "mertens", mg_zeros, mg_grid;
  std::int64_t mg_count = 0;
  double mg_tol = 1e-9, mg_X = 0.0, mg_V = 2.0, mg_theta = 1.0;
  add_zero_source(mg, mg_kind, mg_zeros, mg_count, mg_tol);
  mg->add_option("--T-grid", mg_grid, "comma list of T values")->required();
  mg->add_option("--X", mg_X, "upper frequency cut (default max)");
  mg->add_option("--V", mg_V, "window start");
  mg->add_option("--theta", mg_theta, "theta for the predicted exponent");

  // pipeline ---------------------------------------------------------
  auto* pl = app.add_subcommand("pipeline", "run a config-driven experiment");
  std::string pl_config;
  pl->add_option("config", pl_config, "key-value config file")->required();

  // Let --out/--seed/--format/--threads appear after any subcommand.
  std::function<void(CLI::App*)> allow_globals = [&](CLI::App* a) {
    a->fallthrough();
    for (auto* s : a->get_subcommands([](CLI::App*) { return true; }))
      allow_globals(s);
  };
  allow_globals(&app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    pnerr::set_max_threads(threads);

    if (z_compute->parsed() || z_export->parsed() || z_import->parsed()) {
      std::string dest = z_export->parsed() ? z_export_path : ctx.out;
      pnerr::require(!dest.empty(), errc::usage,
                     "zeros: need --out (or an export PATH)");
      pnerr::zeta::ZeroTable t;
      if (z_import->parsed()) {
        note_input(ctx, z_path);
        t = pnerr::zeta::import_zeros(z_path);
      } else {
        t = acquire_zeros(ctx, "", z_count, z_tol, !z_bare);
      }
      pnerr::zeta::export_zeros(t, dest);
      ctx.notes["zeros"] = t.size();
      write_manifest(ctx, {dest}, dest + ".manifest.json");
      return 0;
    }

    if (sv->parsed()) {
      sieve::SummatorySpec spec;
      spec.kind = sieve::kind_from_name(sv_kind);
      spec.q = sv_q;
      spec.a = sv_a;
      std::vector<double> xs;
      if (!sv_points.empty())
        xs = parse_list(sv_points, "--points");
      else if (!sv_grid.empty())
        xs = parse_range(sv_grid, "--grid");
      else
        throw error(errc::usage, "sieve: need --points or --grid");
      auto table = sieve::summatory(spec, sv_limit, xs);
      sieve::normalize(table);
      Table t;
      const bool aux = spec.kind == sieve::SummatoryKind::pi_qa;
      t.columns = {"x", "raw", "normalized"};
      if (aux) t.columns.push_back("pi");
      for (std::size_t i = 0; i < xs.size(); ++i) {
        std::vector<json> row{json(table.xs[i]), json(table.raw[i]),
                              json(table.normalized[i])};
        if (aux) row.push_back(json(table.aux[i]));
        t.rows.push_back(std::move(row));
      }
      return finish(ctx, t);
    }

    if (ex_cmp->parsed() || ex_scan->parsed() || ex_lap->parsed() ||
        ex_sm->parsed()) {
      const auto kind = pnerr::coeffs::kind_from_name(ex_kind);
      auto zt = acquire_zeros(ctx, ex_zeros, ex_count, ex_tol);
      const auto seq = pnerr::coeffs::build_sequence(kind, zt);
      if (ex_cmp->parsed()) {
        const auto xs = pnerr::linear_grid(ex_xlo, ex_xmax, ex_step);
        sieve::SummatorySpec spec;
        spec.kind = table_kind_for(kind);
        auto table =
            sieve::summatory(spec, std::int64_t(std::ceil(ex_xmax)) + 1, xs);
        sieve::normalize(table);
        pnerr::explicit_sum::ExplicitSum es{
            seq, seq.max_lambda(),
            pnerr::explicit_sum::default_constant(kind)};
        Table t;
        t.columns = {"x", "E", "phi2", "residual"};
        for (std::size_t i = 0; i < xs.size(); ++i) {
          const double phi2 = 2.0 * pnerr::explicit_sum::phi_sum(es, xs[i]);
          t.rows.push_back(
              {json(xs[i]), json(table.normalized[i]), json(phi2),
               json(pnerr::explicit_sum::residual(es, table, xs[i]))});
        }
        return finish(ctx, t);
      }
      if (ex_scan->parsed()) {
        const double T = ex_T > 0.0 ? ex_T : seq.max_lambda();
        const auto r = pnerr::explicit_sum::scan_extremes(seq, T, ex_t0,
                                                          ex_t1, ex_tstep);
        Table t;
        t.kv_object = true;
        t.columns = {"key", "value"};
        t.rows = {{json("T"), json(T)},
                  {json("t_begin"), json(r.t_begin)},
                  {json("t_end"), json(r.t_end)},
                  {json("step"), json(r.step)},
                  {json("max_value"), json(r.max_value)},
                  {json("argmax"), json(r.argmax)},
                  {json("min_value"), json(r.min_value)},
                  {json("argmin"), json(r.argmin)},
                  {json("resolution_warning"), json(r.resolution_warning)}};
        return finish(ctx, t);
      }
      if (ex_lap->parsed()) {
        const double T = ex_T > 0.0 ? ex_T : seq.max_lambda();
        const double emp =
            pnerr::explicit_sum::empirical_laplace(seq, ex_s, T, ex_tmax);
        const double prod =
            pnerr::random_model::mgf_product(seq, ex_s, T);
        Table t;
        t.kv_object = true;
        t.columns = {"key", "value"};
        t.rows = {{json("s"), json(ex_s)},
                  {json("T"), json(T)},
                  {json("t_max"), json(ex_tmax)},
                  {json("empirical"), json(emp)},
                  {json("product"), json(prod)},
                  {json("rel_dev"), json(std::abs(emp - prod) / prod)}};
        return finish(ctx, t);
      }
      const double T = ex_sT > 0.0 ? ex_sT : seq.max_lambda() / 4.0;
      const double Y = ex_sY > 0.0 ? ex_sY : seq.max_lambda();
      const auto r =
          pnerr::explicit_sum::fejer_smooth(seq, ex_st, T, ex_sZ, Y);
      Table t;
      t.kv_object = true;
      t.columns = {"key", "value"};
      t.rows = {{json("t"), json(ex_st)},
                {json("T"), json(T)},
                {json("Z"), json(ex_sZ)},
                {json("Y"), json(Y)},
                {json("value"), json(r.value)},
                {json("error_estimate"), json(r.error_estimate)},
                {json("window_advisory"), json(r.window_advisory)}};
      return finish(ctx, t);
    }

    if (as->parsed()) {
      if (fmt_opt->count() == 0) ctx.format = "json";
      const auto kind = pnerr::coeffs::kind_from_name(as_kind);
      auto zt = acquire_zeros(ctx, as_zeros, as_count, as_tol);
      const auto seq = pnerr::coeffs::build_sequence(kind, zt);
      std::vector<double> grid =
          as_grid.empty() ? geometric_points(20.0, seq.max_lambda(), 40)
                          : parse_list(as_grid, "--grid");
      const auto r = pnerr::coeffs::fit_assumptions(seq, grid);
      Table t;
      t.kv_object = true;
      t.columns = {"key", "value"};
      t.rows = {{json("alpha_minus"), json(r.alpha_minus)},
                {json("alpha_plus"), json(r.alpha_plus)},
                {json("alpha"), json(r.alpha)},
                {json("A"), json(r.A)},
                {json("a2_ratio"), json(r.a2_ratio)},
                {json("a2_nonincreasing"), json(r.a2_nonincreasing)},
                {json("theta"), json(r.theta)},
                {json("theta_flagged"), json(r.theta_flagged)},
                {json("kappa_minus"), json(r.kappa_minus)},
                {json("kappa_plus"), json(r.kappa_plus)},
                {json("max_short_count_ratio"),
                 json(r.max_short_count_ratio)},
                {json("s0_fit_rms"), json(r.s0_fit_rms)},
                {json("s2_fit_rms"), json(r.s2_fit_rms)},
                {json("lambda_unit"), json(r.lambda_unit)}};
      return finish(ctx, t);
    }

    if (rn_sample->parsed() || rn_time->parsed() || rn_tail->parsed() ||
        rn_cmp->parsed()) {
      const auto kind = pnerr::coeffs::kind_from_name(rn_kind);
      auto zt = acquire_zeros(ctx, rn_zeros, rn_count, rn_tol);
      const auto seq = pnerr::coeffs::build_sequence(kind, zt);
      const std::size_t terms =
          rn_terms > 0 ? rn_terms : seq.size();
      pnerr::require(terms >= 1 && terms <= seq.size(), errc::usage,
                     "random: --terms outside [1, sequence size]");
      ctx.notes["n_terms"] = terms;
      if (rn_sample->parsed()) {
        const auto d = pnerr::random_model::sample_Xr(seq, terms, rn_samples,
                                                      ctx.seed);
        return finish(ctx, cdf_table(d, rn_points));
      }
      if (rn_time->parsed()) {
        const auto d = pnerr::random_model::time_average_distribution(
            seq, seq.lambda[terms - 1], 1.0, rn_tend, rn_tstep);
        return finish(ctx, cdf_table(d, rn_points));
      }
      if (rn_tail->parsed()) {
        if (fmt_opt->count() == 0) ctx.format = "json";
        pnerr::coeffs::AssumptionReport fit;
        if (rn_alpha > 0.0 && rn_A > 0.0) {
          fit.alpha = rn_alpha;
          fit.A = rn_A;
        } else {
          fit = pnerr::coeffs::fit_assumptions(
              seq, geometric_points(20.0, seq.max_lambda(), 40));
        }
        const auto r = pnerr::random_model::tail_probability(
            seq, rn_V, terms, rn_samples, ctx.seed, fit, rn_eps);
        Table t;
        t.kv_object = true;
        t.columns = {"key", "value"};
        t.rows = {{json("V"), json(rn_V)},
                  {json("p_hat"), json(r.p_hat)},
                  {json("ci_low"), json(r.ci_low)},
                  {json("ci_high"), json(r.ci_high)},
                  {json("sandwich_lower"), json(r.sandwich_lower)},
                  {json("sandwich_upper"), json(r.sandwich_upper)},
                  {json("upper_bound_only"), json(r.upper_bound_only)}};
        return finish(ctx, t);
      }
      const auto ta = pnerr::random_model::time_average_distribution(
          seq, seq.lambda[terms - 1], 1.0, rn_tend, rn_tstep);
      const auto mc =
          pnerr::random_model::sample_Xr(seq, terms, rn_samples, ctx.seed);
      Table t;
      t.kv_object = true;
      t.columns = {"key", "value"};
      t.rows = {{json("ks"), json(pnerr::random_model::compare_distributions(
                    ta, mc))},
                {json("time_points"), json(std::int64_t(ta.samples))},
                {json("mc_samples"), json(std::int64_t(mc.samples))},
                {json("t_end"), json(rn_tend)},
                {json("step"), json(rn_tstep)}};
      return finish(ctx, t);
    }

    if (cn->parsed()) {
      Table t;
      t.columns = {"name", "value", "tail_estimate"};
      if (cn_which == "a") {
        const auto a = pnerr::constants::constant_a(cn_P);
        t.rows = {{json("a"), json(a.value), json(a.log_tail)}};
      } else if (cn_which == "b") {
        const auto b = pnerr::constants::constant_b(cn_P, cn_N);
        t.rows = {{json("b"), json(b.value), json(b.tail_estimate)}};
      } else if (cn_which == "zeta-prime-neg1") {
        t.rows = {{json("zeta_prime_neg1"),
                   json(pnerr::constants::zeta_prime_neg1()), json(0.0)}};
      } else {
        throw error(errc::usage,
                    "constants: choose a, b, or zeta-prime-neg1");
      }
      return finish(ctx, t);
    }

    if (mo->parsed()) {
      pnerr::constants::MomentKind mk;
      double expo = 0.0;
      if (mo_kind == "Jk") {
        mk = pnerr::constants::MomentKind::J;
        expo = mo_k;
      } else if (mo_kind == "Ks") {
        mk = pnerr::constants::MomentKind::K;
        expo = mo_s;
      } else {
        throw error(errc::usage, "moments: --kind must be Jk or Ks");
      }
      auto zt = acquire_zeros(ctx, mo_zeros, mo_count, mo_tol);
      const auto grid = parse_list(mo_grid, "--grid");
      const auto m = pnerr::constants::moment_sum(mk, expo, zt, grid);
      Table t;
      t.columns = {"T", "value", "predicted", "ratio"};
      for (std::size_t i = 0; i < m.T_grid.size(); ++i)
        t.rows.push_back({json(m.T_grid[i]), json(m.values[i]),
                          json(m.predicted[i]),
                          json(m.values[i] / m.predicted[i])});
      return finish(ctx, t);
    }

    if (mg->parsed()) {
      const auto kind = pnerr::coeffs::kind_from_name(mg_kind);
      auto zt = acquire_zeros(ctx, mg_zeros, mg_count, mg_tol);
      const auto seq = pnerr::coeffs::build_sequence(kind, zt);
      const auto grid = parse_list(mg_grid, "--T-grid");
      const double X = mg_X > 0.0 ? mg_X : seq.max_lambda();
      const auto rep =
          pnerr::meng::meng_report(seq, grid, X, mg_V, mg_theta);
      ctx.notes["decay_exponent"] = rep.decay_exponent;
      ctx.notes["fit_rms"] = rep.fit_rms;
      Table t;
      t.columns = {"T", "double_sum", "window_integral",
                   "predicted_exponent"};
      for (std::size_t i = 0; i < rep.T_grid.size(); ++i)
        t.rows.push_back({json(rep.T_grid[i]), json(rep.double_sums[i]),
                          json(rep.window_integrals[i]),
                          json(rep.predicted_exponent)});
      return finish(ctx, t);
    }

    if (pl->parsed()) return run_pipeline(ctx, pl_config);

    throw error(errc::usage, "no subcommand selected");
  } catch (const error& e) {
    std::string msg = e.what();
    const std::string prefix = std::string(pnerr::errc_name(e.code())) + ": ";
    if (msg.rfind(prefix, 0) == 0) msg = msg.substr(prefix.size());
    for (auto& ch : msg)
      if (ch == '"') ch = '\'';
    std::fprintf(stderr, "pnerr-error code=%s message=\"%s\"\n",
                 pnerr::errc_name(e.code()), msg.c_str());
    return e.code() == errc::usage ? 2 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "pnerr-error code=internal message=\"%s\"\n",
                 e.what());
    return 1;
  }
}
