#pragma once

// Batch front-end: run configuration, dispatch and the report envelope.
//
// Exit codes: 0 verified or trivially_holds, 1 violated, 2 invalid
// parameters or configuration, 3 numerical failure or inconclusive result.
//
// Config files are flat `key = value` lines; `[section]` headers only group
// keys. Every key is the name of a command-line flag (underscores and dashes
// are interchangeable) and flags given on the command line win.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "revhardy/bilinear.hpp"
#include "revhardy/closedform.hpp"
#include "revhardy/errors.hpp"
#include "revhardy/exponents.hpp"
#include "revhardy/hardy.hpp"
#include "revhardy/report.hpp"
#include "revhardy/spaces.hpp"
#include "revhardy/verdict.hpp"

namespace revhardy {

inline constexpr std::string_view kToolName = "revhardy";
inline constexpr std::string_view kToolVersion = "0.1.0";

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> c = {"check-hardy", "check-conjugate-hardy", "compute-constant", "check-hls",
                                             "check-stein-weiss", "scan", "sphere-area", "proof-identities"};
  return c;
}

struct RunConfig {
  std::string command;
  std::string space = "euclidean:1";
  std::optional<double> p;
  std::optional<double> q;
  std::optional<double> alpha;
  std::optional<std::string> beta;  // a number, or "solve"
  std::optional<double> lambda;
  bool conjugate = false;

  std::size_t family_count = 0;  // 0: the command's default
  std::optional<std::uint64_t> family_seed;
  double family_margin = 0.05;
  double family_r_lo = 0.1;
  double family_r_hi = 10.0;
  std::string family_list;  // "s0,s_inf,R;..." or "a0,a_inf,Rf,b0,b_inf,Rh;..." for bilinear forms

  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  std::uint64_t mc_samples = 400'000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::size_t seeds = 2;
  double truncation_radius = 10.0;
  std::string amplitudes = "1e2,1e3,1e4";
  std::string t_grid;  // "lo:hi:n" (log-spaced) or a list

  std::string p_grid = "-3:-0.1:10";
  std::string q_grid = "-3:-0.1:10";
  std::string alpha_grid = "0";
  std::size_t profile_points = 5;

  std::string method = "both";  // sphere-area: quadrature, mc or both

  std::string output;
  std::string format;  // json, csv or text; empty: csv for scan, json otherwise
  bool timing = true;

  std::string resolved_format() const {
    if (!format.empty()) return format;
    return command == "scan" ? "csv" : "json";
  }
};

struct RunResult {
  Json envelope;
  std::optional<Table> table;
  int exit_code = 0;
};

inline int exit_code_for(Verdict v) {
  switch (v) {
    case Verdict::Verified:
    case Verdict::TriviallyHolds: return 0;
    case Verdict::Violated: return 1;
    case Verdict::InvalidParams: return 2;
    case Verdict::Inconclusive: return 3;
  }
  return 3;
}

// ---------------------------------------------------------------------------
// Parsing helpers

namespace detail {

inline double parse_real(const std::string& s) {
  std::size_t used = 0;
  double v;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    fail(ErrorKind::ConfigError, "not a number: '" + s + "'");
  }
  if (used != s.size()) fail(ErrorKind::ConfigError, "not a number: '" + s + "'");
  if (!std::isfinite(v)) fail(ErrorKind::ConfigError, "numeric fields must be finite, got '" + s + "'");
  return v;
}

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

inline std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& x : split(s, ',')) out.push_back(parse_real(x));
  return out;
}

/// "lo:hi:n" (linear, or log-spaced when `log`) or "a,b,c".
inline std::vector<double> parse_grid(const std::string& s, bool log) {
  if (s.find(':') == std::string::npos) return parse_list(s);
  const auto parts = split(s, ':');
  if (parts.size() != 3) fail(ErrorKind::ConfigError, "grid must look like lo:hi:n, got '" + s + "'");
  const double lo = parse_real(parts[0]);
  const double hi = parse_real(parts[1]);
  const double nd = parse_real(parts[2]);
  if (nd < 1 || nd != std::floor(nd)) fail(ErrorKind::ConfigError, "grid size must be a positive integer");
  const auto n = static_cast<std::size_t>(nd);
  if (log) {
    if (!(lo > 0.0) || !(hi > 0.0)) fail(ErrorKind::ConfigError, "log grid needs positive ends");
    return n == 1 ? std::vector<double>{lo} : log_grid(lo, hi, n);
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
  return out;
}

}  // namespace detail

/// `key = value` pairs in file order; `[section]` lines and `#` / `;`
/// comments are skipped.
inline std::vector<std::pair<std::string, std::string>> parse_ini(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream is(text);
  std::string line;
  int n = 0;
  while (std::getline(is, line)) {
    ++n;
    line = detail::trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(ErrorKind::ConfigError, "line " + std::to_string(n) + ": unterminated section header");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(ErrorKind::ConfigError, "line " + std::to_string(n) + ": expected key = value");
    std::string key = detail::trim(line.substr(0, eq));
    std::string value = detail::trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (key.empty()) fail(ErrorKind::ConfigError, "line " + std::to_string(n) + ": empty key");
    std::replace(key.begin(), key.end(), '_', '-');
    out.emplace_back(key, value);
  }
  return out;
}

namespace detail {

inline std::string flag_names(std::string name) {
  std::string under = name;
  std::replace(under.begin(), under.end(), '-', '_');
  return under == name ? "--" + name : "--" + name + ",--" + under;
}

inline void add_options(CLI::App& app, RunConfig& c, std::string& config_path) {
  auto opt = [&](const std::string& name, auto& target, const std::string& help) {
    return app.add_option(flag_names(name), target, help)->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  };
  app.add_option("command", c.command, "command to run")->check(CLI::IsMember(commands()));
  opt("config", config_path, "config file (flat key = value, flags override)");
  opt("space", c.space, "euclidean:<n>, heisenberg:1 or hyperbolic:<n>");
  opt("p", c.p, "exponent p < 0");
  opt("q", c.q, "exponent q <= p");
  opt("alpha", c.alpha, "weight exponent alpha");
  opt("beta", c.beta, "weight exponent beta, or 'solve'");
  opt("lambda", c.lambda, "kernel exponent for check-hls (derived when omitted)");
  app.add_flag(flag_names("conjugate"), c.conjugate, "use complements (conjugate inequality)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  opt("family-count", c.family_count, "number of sampled test functions");
  opt("family-seed", c.family_seed, "seed of the sampled family (defaults to --seed)");
  opt("family-margin", c.family_margin, "fraction of each exponent window kept clear");
  opt("family-r-lo", c.family_r_lo, "smallest breakpoint radius");
  opt("family-r-hi", c.family_r_hi, "largest breakpoint radius");
  opt("family-list", c.family_list, "explicit family: s0,s_inf,R;... (or a0,a_inf,Rf,b0,b_inf,Rh;...)");
  opt("rel-tol", c.rel_tol, "quadrature relative tolerance");
  opt("abs-tol", c.abs_tol, "quadrature absolute tolerance");
  opt("mc-samples", c.mc_samples, "Monte Carlo samples per estimate");
  opt("seed", c.seed, "master seed");
  opt("threads", c.threads, "worker threads (0: hardware)");
  opt("seeds", c.seeds, "independent seeds per bilinear estimate");
  opt("truncation-radius", c.truncation_radius, "radius R of B(0,R) x B(0,R) when the form diverges at infinity");
  opt("amplitudes", c.amplitudes, "extremal family amplitudes, comma separated");
  opt("t-grid", c.t_grid, "profile / identity radii: lo:hi:n (log) or a list");
  opt("p-grid", c.p_grid, "scan grid for p: lo:hi:n or a list");
  opt("q-grid", c.q_grid, "scan grid for q");
  opt("alpha-grid", c.alpha_grid, "scan grid for alpha");
  opt("profile-points", c.profile_points, "profile radii checked per scan row");
  opt("method", c.method, "sphere-area method: quadrature, mc or both")
      ->check(CLI::IsMember({"quadrature", "mc", "both"}));
  opt("output", c.output, "output path (stdout when empty)");
  opt("format", c.format, "json, csv or text")->check(CLI::IsMember({"json", "csv", "text"}));
  app.add_flag("--timing,!--no-timing", c.timing, "include the timing section")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
}

}  // namespace detail

/// Parses the command line. The values of a --config file are placed in
/// front of the explicit arguments, so the explicit ones take precedence.
inline RunConfig parse_args(std::vector<std::string> args) {
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const auto& a = args[i];
    if ((a == "--config") && i + 1 < args.size()) config_path = args[i + 1];
    if (a.rfind("--config=", 0) == 0) config_path = a.substr(9);
  }
  std::vector<std::string> merged;
  std::optional<std::string> file_command;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) fail(ErrorKind::ConfigError, "cannot read config file '" + config_path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    for (const auto& [k, v] : parse_ini(ss.str())) {
      if (k == "command") {
        file_command = v;
        continue;
      }
      if (k == "config") fail(ErrorKind::ConfigError, "config files cannot include other config files");
      merged.push_back("--" + k + "=" + v);
    }
  }
  const bool has_command = !args.empty() && args[0].rfind("-", 0) != 0;
  if (!has_command && file_command) merged.insert(merged.begin(), *file_command);
  if (has_command) {
    merged.insert(merged.begin(), args[0]);
    merged.insert(merged.end(), args.begin() + 1, args.end());
  } else {
    merged.insert(merged.end(), args.begin(), args.end());
  }

  RunConfig cfg;
  std::string ignored;
  CLI::App app{"Verification engine for reverse Hardy, HLS and Stein-Weiss inequalities", std::string(kToolName)};
  detail::add_options(app, cfg, ignored);
  std::vector<std::string> rev(merged.rbegin(), merged.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    throw;
  } catch (const CLI::ParseError& e) {
    fail(ErrorKind::ConfigError, e.what());
  }
  if (cfg.command.empty()) fail(ErrorKind::ConfigError, "a command is required: " + [] {
    std::string s;
    for (const auto& c : commands()) s += (s.empty() ? "" : ", ") + c;
    return s;
  }());
  return cfg;
}

inline std::string help_text() {
  RunConfig cfg;
  std::string ignored;
  CLI::App app{"Verification engine for reverse Hardy, HLS and Stein-Weiss inequalities", std::string(kToolName)};
  detail::add_options(app, cfg, ignored);
  return app.help();
}

// ---------------------------------------------------------------------------
// Commands

namespace detail {

inline double require(const std::optional<double>& v, const char* name) {
  if (!v) fail(ErrorKind::ConfigError, std::string("--") + name + " is required for this command");
  if (!std::isfinite(*v)) fail(ErrorKind::ConfigError, std::string("--") + name + " must be finite");
  return *v;
}

inline QuadratureConfig quad_of(const RunConfig& c) {
  QuadratureConfig q;
  q.rel_tol = c.rel_tol;
  q.abs_tol = c.abs_tol;
  q.validate();
  return q;
}

inline FamilySpec family_spec(const RunConfig& c, std::size_t default_count) {
  FamilySpec f;
  f.count = c.family_count ? c.family_count : default_count;
  f.seed = c.family_seed.value_or(c.seed);
  f.margin = c.family_margin;
  f.r_lo = c.family_r_lo;
  f.r_hi = c.family_r_hi;
  if (!(f.r_lo > 0.0) || !(f.r_hi >= f.r_lo)) fail(ErrorKind::ConfigError, "family radius range is invalid");
  if (!(f.margin >= 0.0 && f.margin < 0.5)) fail(ErrorKind::ConfigError, "family margin must lie in [0, 0.5)");
  return f;
}

inline std::vector<std::vector<double>> parse_tuples(const std::string& s, std::size_t width) {
  std::vector<std::vector<double>> out;
  for (const auto& item : split(s, ';')) {
    auto v = parse_list(item);
    if (v.size() != width) {
      fail(ErrorKind::ConfigError, "family entry '" + item + "' needs " + std::to_string(width) + " numbers");
    }
    out.push_back(std::move(v));
  }
  if (out.empty()) fail(ErrorKind::ConfigError, "explicit family is empty");
  return out;
}

struct Payload {
  Json derived = Json::object();
  Json result = Json::object();
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> warnings;
  Verdict verdict = Verdict::Inconclusive;
  std::optional<Table> table;
};

inline double beta_of(const RunConfig& c, double Q, const ExponentPair& e, double alpha, Payload& out) {
  if (!c.beta) fail(ErrorKind::ConfigError, "--beta is required for this command (a number or 'solve')");
  if (*c.beta == "solve") {
    const double b = solve_beta(alpha, Q, e);
    out.derived["beta"] = number(b);
    return b;
  }
  return parse_real(*c.beta);
}

inline Json closed_form_json(const PolarSpace& space, const ExponentPair& e, double alpha, double beta, bool conjugate,
                             std::optional<double> sphere_area = {}) {
  if (!space.power_law() || !space.group()) return Json{{"available", false}, {"reason", "space is not a power-law group"}};
  PowerParams pp{space.homogeneous_dim(), sphere_area.value_or(space.sphere_area()), alpha, beta, e};
  try {
    const auto hc = conjugate ? hardy_constant_conjugate(pp) : hardy_constant_direct(pp);
    return Json{{"available", true},
                {"sphere_area", number(pp.sphere_area)},
                {"D", number(hc.D)},
                {"c_lower", number(hc.c_lower)},
                {"c_upper", number(hc.c_upper)},
                {"factor", number(hc.factor)}};
  } catch (const Error& err) {
    return Json{{"available", false}, {"reason", err.what()}};
  }
}

inline Payload cmd_hardy(const RunConfig& c, bool conjugate) {
  Payload out;
  const PolarSpace space = parse_space(c.space);
  const ExponentPair e = make_exponents(require(c.p, "p"), require(c.q, "q"));
  const double alpha = require(c.alpha, "alpha");
  out.derived["p_conj"] = number(e.p_conj);
  out.derived["q_conj"] = number(e.q_conj);
  const double beta = beta_of(c, space.homogeneous_dim(), e, alpha, out);
  const WeightPair w = WeightPair::powers(alpha, beta);

  std::vector<PiecewisePowerFunction> fs;
  const FamilySpec spec = family_spec(c, 50);
  if (!c.family_list.empty()) {
    for (const auto& t : parse_tuples(c.family_list, 3)) fs.emplace_back(t[0], t[1], t[2]);
  } else {
    if (!space.power_law()) {
      fail(ErrorKind::ConfigError, "sampled families need a power-law space; pass --family-list on " + space.name());
    }
    const auto win = admissible_window(space.homogeneous_dim(), alpha, beta, e, conjugate);
    fs = sample_family(win, spec);
    out.result["window"] = Json{{"s0", {number(win.s0.lo), number(win.s0.hi)}},
                                {"s_inf", {number(win.s_inf.lo), number(win.s_inf.hi)}}};
  }
  out.seeds = {spec.seed};
  HardyOptions opt;
  opt.quad = quad_of(c);
  opt.amplitudes = parse_list(c.amplitudes);
  opt.threads = c.threads;
  if (!c.t_grid.empty()) opt.radii = parse_grid(c.t_grid, true);
  const auto family = as_family(fs);
  const HardyReport rep = verify_hardy(space, w, e, family, opt, conjugate);
  out.result["report"] = to_json(rep);
  out.result["closed_form"] = closed_form_json(space, e, alpha, beta, conjugate);
  out.warnings = rep.warnings;
  out.verdict = rep.verdict;
  out.table = hardy_table(rep);
  return out;
}

inline Payload cmd_compute_constant(const RunConfig& c) {
  Payload out;
  const PolarSpace space = parse_space(c.space);
  const ExponentPair e = make_exponents(require(c.p, "p"), require(c.q, "q"));
  const double alpha = require(c.alpha, "alpha");
  out.derived["p_conj"] = number(e.p_conj);
  out.derived["q_conj"] = number(e.q_conj);
  const double beta = beta_of(c, space.homogeneous_dim(), e, alpha, out);
  const WeightPair w = WeightPair::powers(alpha, beta);
  const auto radii = c.t_grid.empty() ? std::vector<double>{0.01, 0.1, 1.0, 10.0, 100.0} : parse_grid(c.t_grid, true);
  const DProfile prof = d_profile(space, w, e, radii, c.conjugate, quad_of(c));
  const auto cb = constant_bounds(e, prof.infimum);
  out.result["profile"] = to_json(prof);
  out.result["D"] = number(prof.infimum);
  out.result["bounds"] = Json{{"c_lower", number(cb.c_lower)}, {"c_upper", number(cb.c_upper)}, {"factor", number(cb.factor)}};
  Json cf = closed_form_json(space, e, alpha, beta, c.conjugate);
  if (space.group() && (c.method == "mc" || c.method == "both")) {
    const auto mc = sphere_area_mc(*space.group(), c.mc_samples, c.seed);
    out.seeds = {c.seed};
    Json cf_mc = closed_form_json(space, e, alpha, beta, c.conjugate, mc.mean);
    cf_mc["sphere_area_std_error"] = number(mc.std_error);
    out.result["closed_form_mc_sphere"] = cf_mc;
  }
  for (const auto& msg : prof.warnings) out.warnings.push_back(msg);
  const Monotonicity expected = c.conjugate ? Monotonicity::NonIncreasing : Monotonicity::NonDecreasing;
  bool ok = prof.monotone == expected;
  if (cf.value("available", false)) {
    const double D = number_from(cf["D"]);
    const double rel = std::abs(D - prof.infimum) / D;
    cf["relative_deviation"] = number(rel);
    ok = ok && rel <= 1e-6;
  }
  out.result["closed_form"] = cf;
  out.verdict = ok ? Verdict::Verified : Verdict::Inconclusive;
  Table t{{"t", "D"}, {}};
  for (std::size_t i = 0; i < prof.radii.size(); ++i) t.rows.push_back({format_real(prof.radii[i]), format_real(prof.values[i])});
  out.table = t;
  return out;
}

inline Json triangle_constant_json(const HomogeneousGroup& g, std::uint64_t seed) {
  return Json{{"used", number(g.triangle_constant())}, {"empirical", number(estimate_triangle_constant(g, 100'000, seed))}};
}

inline SWOptions sw_options(const RunConfig& c) {
  SWOptions opt;
  opt.mc.samples = c.mc_samples;
  opt.mc.seed = c.seed;
  opt.mc.truncation_radius = c.truncation_radius;
  opt.mc.threads = c.threads;
  opt.seeds = c.seeds;
  opt.quad = quad_of(c);
  opt.chain.truncation_radius = c.truncation_radius;
  opt.chain.seed = c.seed;
  return opt;
}

inline std::vector<SWPair> sw_family(const RunConfig& c, const SWParams& sp, std::size_t default_count,
                                     std::vector<std::uint64_t>& seeds) {
  if (!c.family_list.empty()) {
    std::vector<SWPair> out;
    for (const auto& t : parse_tuples(c.family_list, 6)) {
      out.push_back({PiecewisePowerFunction(t[0], t[1], t[2]), PiecewisePowerFunction(t[3], t[4], t[5])});
    }
    return out;
  }
  const FamilySpec spec = family_spec(c, default_count);
  seeds.push_back(spec.seed);
  return sample_sw_family(sp, spec);
}

inline Payload bilinear_payload(const RunConfig& c, const SWParams& sp, std::size_t default_count) {
  Payload out;
  out.derived["p_conj"] = number(sp.exps.p_conj);
  out.derived["q_conj"] = number(sp.exps.q_conj);
  out.derived["lambda"] = number(sp.lambda);
  const auto family = sw_family(c, sp, default_count, out.seeds);
  const SWOptions opt = sw_options(c);
  for (std::size_t k = 0; k < opt.seeds; ++k) out.seeds.push_back(derive_seed(c.seed, k));
  const BilinearReport rep = verify_sw(sp, family, opt);
  out.result["report"] = to_json(rep);
  out.result["triangle_constant"] = triangle_constant_json(sp.group(), c.seed);
  out.warnings = rep.warnings;
  out.verdict = rep.verdict;
  out.table = bilinear_table(rep);
  return out;
}

inline Payload cmd_hls(const RunConfig& c) {
  const PolarSpace space = parse_space(c.space);
  const auto chk = hls_param_check(space, require(c.p, "p"), require(c.q, "q"), c.lambda);
  return bilinear_payload(c, chk.params, 3);
}

inline Payload cmd_stein_weiss(const RunConfig& c) {
  const PolarSpace space = parse_space(c.space);
  const double alpha = require(c.alpha, "alpha");
  if (!c.beta || *c.beta == "solve") fail(ErrorKind::ConfigError, "--beta must be a number for check-stein-weiss");
  const SWParams sp = sw_param_check(space, require(c.p, "p"), require(c.q, "q"), alpha, parse_real(*c.beta));
  return bilinear_payload(c, sp, 10);
}

inline std::string scan_reason(double Q, double p, double q, double alpha, bool conjugate) {
  if (!(p < 0.0)) return "p_not_negative";
  if (!(q <= p)) return "q_above_p";
  const ExponentPair e = make_exponents(p, q);
  const double beta = solve_beta(alpha, Q, e);
  const double a = Q + alpha;
  const double b = Q + beta * (1.0 - e.p_conj);
  if (!conjugate) {
    if (!(a > kBoundaryExponentTol)) return "u_not_integrable_at_zero";
    if (!(b > kBoundaryExponentTol)) return "dual_v_not_integrable_at_zero";
  } else {
    if (!(a < -kBoundaryExponentTol)) return "u_not_integrable_at_infinity";
    if (!(b < -kBoundaryExponentTol)) return "dual_v_not_integrable_at_infinity";
  }
  return {};
}

inline Payload cmd_scan(const RunConfig& c) {
  Payload out;
  const PolarSpace space = parse_space(c.space);
  if (!space.power_law() || !space.group()) fail(ErrorKind::ConfigError, "scan needs a power-law group");
  const auto ps = parse_grid(c.p_grid, false);
  const auto qs = parse_grid(c.q_grid, false);
  const auto as = parse_grid(c.alpha_grid, false);
  const double rows = static_cast<double>(ps.size()) * static_cast<double>(qs.size()) * static_cast<double>(as.size());
  if (rows > 1e5) fail(ErrorKind::ConfigError, "scan grid has more than 1e5 rows");
  const double Q = space.homogeneous_dim();
  const auto radii = c.profile_points ? log_grid(1e-2, 1e2, std::max<std::size_t>(c.profile_points, 2)) : std::vector<double>{};
  const QuadratureConfig quad = quad_of(c);

  struct Tuple {
    double p, q, alpha;
  };
  std::vector<Tuple> tuples;
  for (double p : ps)
    for (double q : qs)
      for (double a : as) tuples.push_back({p, q, a});

  auto rows_out = parallel_map(
      tuples.size(),
      [&](std::size_t i) -> std::vector<std::string> {
        const auto [p, q, a] = tuples[i];
        const std::string reason = scan_reason(Q, p, q, a, c.conjugate);
        if (!reason.empty()) {
          return {format_real(p), format_real(q), format_real(a), "", "", "", "", "", "", "inadmissible", reason};
        }
        const ExponentPair e = make_exponents(p, q);
        const double beta = solve_beta(a, Q, e);
        try {
          PowerParams pp{Q, space.sphere_area(), a, beta, e};
          const auto hc = c.conjugate ? hardy_constant_conjugate(pp) : hardy_constant_direct(pp);
          std::string mono = "", spread = "";
          if (!radii.empty()) {
            const auto prof = d_profile(space, WeightPair::powers(a, beta), e, radii, c.conjugate, quad);
            mono = std::string(to_string(prof.monotone));
            spread = format_real(prof.spread());
          }
          return {format_real(p), format_real(q), format_real(a), format_real(beta), format_real(hc.D),
                  format_real(hc.factor), format_real(hc.c_lower), mono, spread, "admissible", ""};
        } catch (const Error& err) {
          return {format_real(p), format_real(q), format_real(a), format_real(beta), "", "", "", "", "", "error",
                  std::string(to_string(err.kind()))};
        }
      },
      c.threads);

  Table t{{"p", "q", "alpha", "beta", "D", "factor", "c_lower", "monotone", "spread", "status", "reason"}, {}};
  t.rows = std::move(rows_out);
  std::size_t admissible = 0, errors = 0, factor_violations = 0;
  double max_factor = 0.0, max_spread = 0.0;
  for (const auto& r : t.rows) {
    if (r[9] == "admissible") {
      ++admissible;
      const double f = detail::parse_real(r[5]);
      max_factor = std::max(max_factor, f);
      if (f > 1.0) ++factor_violations;
      if (!r[8].empty()) max_spread = std::max(max_spread, detail::parse_real(r[8]));
    } else if (r[9] == "error") {
      ++errors;
    }
  }
  Json jrows = Json::array();
  for (const auto& r : t.rows) {
    Json j;
    for (std::size_t k = 0; k < t.header.size(); ++k) j[t.header[k]] = r[k];
    jrows.push_back(j);
  }
  out.result["rows"] = jrows;
  out.result["summary"] = Json{{"rows", t.rows.size()},
                               {"admissible", admissible},
                               {"errors", errors},
                               {"max_factor", number(max_factor)},
                               {"factor_violations", factor_violations},
                               {"max_profile_spread", number(max_spread)}};
  out.verdict = errors == 0 && factor_violations == 0 && max_spread <= 1e-6 ? Verdict::Verified : Verdict::Inconclusive;
  out.table = std::move(t);
  return out;
}

inline std::optional<double> known_sphere_area(const PolarSpace& space) {
  if (space.kind() == PolarSpace::Kind::Heisenberg) return std::numbers::pi * std::numbers::pi / 2.0;
  switch (space.topological_dim()) {
    case 1: return 2.0;
    case 2: return 2.0 * std::numbers::pi;
    case 3: return 4.0 * std::numbers::pi;
  }
  return std::nullopt;
}

inline Payload cmd_sphere_area(const RunConfig& c) {
  Payload out;
  const PolarSpace space = parse_space(c.space);
  const HomogeneousGroup g = space.group() ? *space.group() : HomogeneousGroup::euclidean(space.topological_dim());
  bool ok = true;
  Table t{{"method", "value", "std_error"}, {}};
  std::optional<double> quad, mc;
  if (c.method != "mc") {
    quad = sphere_area(g, VolumeMethod::Quadrature);
    out.result["quadrature"] = number(*quad);
    t.rows.push_back({"quadrature", format_real(*quad), ""});
  }
  if (c.method != "quadrature") {
    const auto est = sphere_area_mc(g, c.mc_samples, c.seed);
    out.seeds = {c.seed};
    mc = est.mean;
    out.result["monte_carlo"] = to_json(est);
    t.rows.push_back({"monte_carlo", format_real(est.mean), format_real(est.std_error)});
  }
  if (quad && mc) {
    const double rel = std::abs(*quad - *mc) / *quad;
    out.result["relative_difference"] = number(rel);
    ok = ok && rel <= 5e-3;
  }
  if (const auto known = known_sphere_area(space)) {
    out.result["reference"] = number(*known);
    if (quad) {
      const double rel = std::abs(*quad - *known) / *known;
      out.result["quadrature_deviation"] = number(rel);
      ok = ok && rel <= 1e-6;
    }
  }
  out.result["homogeneous_dim"] = number(g.homogeneous_dim());
  out.result["triangle_constant"] = triangle_constant_json(g, c.seed);
  out.verdict = ok ? Verdict::Verified : Verdict::Inconclusive;
  out.table = t;
  return out;
}

inline Payload cmd_proof_identities(const RunConfig& c) {
  Payload out;
  const PolarSpace space = parse_space(c.space);
  const ExponentPair e = make_exponents(require(c.p, "p"), c.q ? *c.q : require(c.p, "p"));
  out.derived["p_conj"] = number(e.p_conj);
  if (!c.beta || *c.beta == "solve") fail(ErrorKind::ConfigError, "--beta must be a number for proof-identities");
  const double beta = parse_real(*c.beta);
  const double dual0 = space.density_exponent_at_zero() + 1.0 + beta * (1.0 - e.p_conj);
  if (!(dual0 > 0.0)) fail(ErrorKind::InadmissibleWeights, "v^(1-p') is not integrable at 0");
  const auto ts = c.t_grid.empty() ? log_grid(1e-2, 1e2, 10) : parse_grid(c.t_grid, true);
  const auto rep = proof_identity_check(space, RadialFunction::power(beta), e, ts, quad_of(c));
  out.result["v"] = "|x|^" + RadialFunction::format_number(beta);
  out.result["identity"] = to_json(rep);
  out.verdict = rep.holds ? Verdict::Verified : Verdict::Violated;
  Table t{{"t", "H1", "expected", "rel_error"}, {}};
  for (const auto& r : rep.rows) t.rows.push_back({format_real(r.t), format_real(r.H1), format_real(r.expected), format_real(r.rel_error)});
  out.table = t;
  return out;
}

inline Json config_echo(const RunConfig& c) {
  auto opt_num = [](const std::optional<double>& v) { return v ? number(*v) : Json(nullptr); };
  return Json{{"command", c.command},
              {"space", c.space},
              {"p", opt_num(c.p)},
              {"q", opt_num(c.q)},
              {"alpha", opt_num(c.alpha)},
              {"beta", c.beta ? Json(*c.beta) : Json(nullptr)},
              {"lambda", opt_num(c.lambda)},
              {"conjugate", c.conjugate},
              {"family",
               {{"count", c.family_count},
                {"seed", c.family_seed ? Json(*c.family_seed) : Json(nullptr)},
                {"margin", number(c.family_margin)},
                {"r_lo", number(c.family_r_lo)},
                {"r_hi", number(c.family_r_hi)},
                {"list", c.family_list}}},
              {"rel_tol", number(c.rel_tol)},
              {"abs_tol", number(c.abs_tol)},
              {"mc_samples", c.mc_samples},
              {"seed", c.seed},
              {"seeds", c.seeds},
              {"truncation_radius", number(c.truncation_radius)},
              {"amplitudes", c.amplitudes},
              {"t_grid", c.t_grid},
              {"p_grid", c.p_grid},
              {"q_grid", c.q_grid},
              {"alpha_grid", c.alpha_grid},
              {"profile_points", c.profile_points},
              {"method", c.method},
              {"format", c.resolved_format()}};
}

}  // namespace detail

/// Runs one command. Failures become an envelope with verdict
/// invalid_params (exit 2) or inconclusive (exit 3) and an "error" entry.
inline RunResult run(const RunConfig& c) {
  const auto start = std::chrono::steady_clock::now();
  detail::Payload p;
  std::optional<std::string> error;
  int code = 0;
  try {
    if (c.command == "check-hardy") p = detail::cmd_hardy(c, c.conjugate);
    else if (c.command == "check-conjugate-hardy") p = detail::cmd_hardy(c, true);
    else if (c.command == "compute-constant") p = detail::cmd_compute_constant(c);
    else if (c.command == "check-hls") p = detail::cmd_hls(c);
    else if (c.command == "check-stein-weiss") p = detail::cmd_stein_weiss(c);
    else if (c.command == "scan") p = detail::cmd_scan(c);
    else if (c.command == "sphere-area") p = detail::cmd_sphere_area(c);
    else if (c.command == "proof-identities") p = detail::cmd_proof_identities(c);
    else fail(ErrorKind::ConfigError, "unknown command '" + c.command + "'");
    code = exit_code_for(p.verdict);
  } catch (const Error& err) {
    error = err.what();
    p.verdict = err.is_parameter_error() ? Verdict::InvalidParams : Verdict::Inconclusive;
    p.result = Json::object();
    p.table.reset();
    code = err.is_parameter_error() ? 2 : 3;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  Json env;
  env["schema_version"] = kSchemaVersion;
  env["tool"] = Json{{"name", kToolName}, {"version", kToolVersion}};
  env["command"] = c.command;
  env["config"] = detail::config_echo(c);
  env["derived"] = p.derived;
  env["seeds"] = p.seeds;
  env["verdict"] = std::string(to_string(p.verdict));
  env["exit_code"] = code;
  env["warnings"] = p.warnings;
  if (error) env["error"] = *error;
  env["result"] = p.result;
  env["payload_digest"] = fnv1a_hex(env.dump());
  if (c.timing) {
    Json timing{{"wall_seconds", wall}};
    timing["digest"] = fnv1a_hex(timing.dump());
    env["timing"] = timing;
  }
  return {std::move(env), std::move(p.table), code};
}

/// The envelope in the configured format.
inline std::string render(const RunConfig& c, const RunResult& r) {
  const std::string fmt = c.resolved_format();
  if (fmt == "json") return r.envelope.dump(2) + "\n";
  if (fmt == "csv") {
    if (r.table) return to_csv(*r.table);
    Table t{{"key", "value"}, {{"verdict", r.envelope["verdict"].get<std::string>()}}};
    if (r.envelope.contains("error")) t.rows.push_back({"error", r.envelope["error"].get<std::string>()});
    return to_csv(t);
  }
  std::ostringstream os;
  os << kToolName << ' ' << kToolVersion << "  " << c.command << "  " << c.space << '\n';
  os << "verdict: " << r.envelope["verdict"].get<std::string>() << "  (exit " << r.exit_code << ")\n";
  if (r.envelope.contains("error")) os << "error: " << r.envelope["error"].get<std::string>() << '\n';
  for (const auto& [k, v] : r.envelope["derived"].items()) os << k << ": " << v.dump() << '\n';
  for (const auto& w : r.envelope["warnings"]) os << "warning: " << w.get<std::string>() << '\n';
  if (r.table) os << '\n' << to_text(*r.table);
  return os.str();
}

/// Full command-line entry point.
inline int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = parse_args(args);
  } catch (const CLI::CallForHelp&) {
    out << help_text();
    return 0;
  } catch (const Error& e) {
    err << e.what() << '\n';
    return 2;
  }
  const RunResult r = run(cfg);
  const std::string text = render(cfg, r);
  if (cfg.output.empty()) {
    out << text;
  } else {
    std::ofstream f(cfg.output, std::ios::binary);
    if (!f) {
      err << "cannot write " << cfg.output << '\n';
      return 2;
    }
    f << text;
  }
  if (r.envelope.contains("error")) err << r.envelope["error"].get<std::string>() << '\n';
  return r.exit_code;
}

}  // namespace revhardy
