// Acceptance run: one PASS/FAIL line per criterion with its runtime. Every
// criterion is run twice; criterion 11 compares the two payloads.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "revhardy/bilinear.hpp"
#include "revhardy/closedform.hpp"
#include "revhardy/hardy.hpp"
#include "revhardy/montecarlo.hpp"
#include "revhardy/report.hpp"

using namespace revhardy;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
  Json payload;
};

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

const std::vector<double> kRadii = {0.01, 0.1, 1.0, 10.0, 100.0};

Outcome closed_form_direct() {
  Outcome o;
  const auto sp = PolarSpace::euclidean(1);
  const auto e = make_exponents(-1.0, -1.0);
  const auto prof = d1_profile(sp, WeightPair::powers(0.0, -1.0), e, kRadii);
  double dev = 0.0;
  for (double v : prof.values) dev = std::max(dev, rel(v, 8.0));
  const auto b = constant_bounds(e, 8.0);
  bool ok = dev <= 1e-6 && b.c_lower == 2.0 && b.c_upper == 8.0;

  double grid_dev = 0.0;
  int points = 0;
  for (double p : {-0.5, -1.0, -2.0, -3.0}) {
    for (double gap : {0.0, 0.5, 1.5}) {
      for (double alpha : {-0.5, 0.0, 1.0}) {
        if (points == 20) break;
        const auto ex = make_exponents(p, p - gap);
        const double beta = solve_beta(alpha, 1.0, ex);
        const auto hc = hardy_constant_direct({1.0, sp.sphere_area(), alpha, beta, ex});
        const auto pr = d1_profile(sp, WeightPair::powers(alpha, beta), ex, kRadii);
        for (double v : pr.values) grid_dev = std::max(grid_dev, rel(v, hc.D));
        ++points;
      }
    }
  }
  ok = ok && points == 20 && grid_dev <= 1e-5;
  o.pass = ok;
  o.detail = "max |D1/8-1| " + fmt("%.2e", dev) + ", 20-point grid max dev " + fmt("%.2e", grid_dev);
  o.payload = Json{{"profile", numbers(prof.values)}, {"grid_dev", number(grid_dev)}};
  return o;
}

Outcome closed_form_conjugate() {
  Outcome o;
  const auto e = make_exponents(-1.0, -1.0);
  const auto prof = d2_profile(PolarSpace::euclidean(1), WeightPair::powers(-2.0, -3.0), e, kRadii);
  double dev = 0.0;
  for (double v : prof.values) dev = std::max(dev, rel(v, 8.0));
  const auto b = constant_bounds(e, 8.0);
  o.pass = dev <= 1e-6 && b.c_lower == 2.0 && b.c_upper == 8.0;
  o.detail = "max |D2/8-1| " + fmt("%.2e", dev) + ", bounds (2, 8)";
  o.payload = Json{{"profile", numbers(prof.values)}};
  return o;
}

Outcome hardy_lower_bound() {
  Outcome o;
  const auto sp = PolarSpace::euclidean(1);
  const auto e = make_exponents(-1.0, -1.0);
  const auto fam = as_family(sample_family(admissible_window(1.0, 0.0, -1.0, e, false), FamilySpec{50, 7}));
  const auto rep = verify_hardy(sp, WeightPair::powers(0.0, -1.0), e, fam);
  std::size_t below = 0, computed = 0;
  for (const auto& r : rep.ratios) {
    if (!r.error.empty()) continue;
    ++computed;
    if (!(r.value >= 2.0 * (1.0 - 1e-6))) ++below;
  }
  o.pass = computed == 50 && below == 0 && rep.extremal.size() == 3 && rep.min_extremal <= 8.0 * (1.0 + 1e-2);
  o.detail = "50 ratios, min " + fmt("%.6f", rep.min_ratio) + ", extremal min " + fmt("%.6f", rep.min_extremal) +
             " (A = 1e2..1e4), verdict " + std::string(to_string(rep.verdict));
  o.payload = to_json(rep);
  return o;
}

Outcome proof_identity() {
  Outcome o;
  const auto sp = PolarSpace::euclidean(1);
  const auto e = make_exponents(-1.0, -1.0);
  double worst = 0.0;
  bool ok = true;
  Json reps = Json::array();
  for (double beta : {-1.5, -1.0, -0.5, 0.0, 1.0}) {
    const auto rep = proof_identity_check(sp, RadialFunction::power(beta), e, log_grid(0.01, 100.0, 10));
    ok = ok && rep.holds && rep.rows.size() == 10;
    worst = std::max(worst, rep.max_rel_error);
    reps.push_back(to_json(rep));
  }
  o.pass = ok && worst <= 1e-6;
  o.detail = "5 weights x 10 radii, max rel error " + fmt("%.2e", worst);
  o.payload = reps;
  return o;
}

Outcome reverse_holder() {
  Outcome o;
  const auto sp = PolarSpace::euclidean(1);
  const QuadratureConfig tight{1e-11, 1e-14};
  CounterRng rng(2024, 5);
  std::size_t violations = 0, errors = 0;
  double worst_slack = kInf;
  for (int i = 0; i < 1000; ++i) {
    const double p = -rng.uniform(0.1, 4.0);
    const double pc = conjugate(p);
    const PiecewisePowerFunction f(rng.uniform(0.02, 0.98) / -p, rng.uniform(1.02, 4.0) / -p, std::exp(rng.uniform(-2.0, 2.0)),
                                   std::exp(rng.uniform(-1.0, 1.0)));
    const PiecewisePowerFunction g(-rng.uniform(0.02, 0.98) / pc, -rng.uniform(1.02, 4.0) / pc,
                                   std::exp(rng.uniform(-2.0, 2.0)), std::exp(rng.uniform(-1.0, 1.0)));
    try {
      const auto h = reverse_holder_check(f.radial(), g.radial(), p, sp, tight, 1e-10);
      if (!h.holds) ++violations;
      worst_slack = std::min(worst_slack, h.lhs / h.rhs - 1.0);
    } catch (const Error&) {
      ++errors;
    }
  }
  double worst_eq = 0.0;
  for (int i = 0; i < 10; ++i) {
    const double p = -0.3 - 0.4 * i;
    const double pc = conjugate(p);
    const PiecewisePowerFunction f(0.5 / -p, 2.0 / -p, 0.5 + 0.3 * i, 1.0 + 0.1 * i);
    const RadialFunction g = f.radial().pow(p / pc).scaled(0.2 + 0.5 * i);
    const auto h = reverse_holder_check(f.radial(), g, p, sp, tight);
    worst_eq = std::max(worst_eq, rel(h.lhs, h.rhs));
  }
  o.pass = violations == 0 && errors == 0 && worst_eq <= 1e-8;
  o.detail = "1000 pairs, " + std::to_string(violations) + " violations, " + std::to_string(errors) +
             " errors, min slack " + fmt("%.2e", worst_slack) + "; 10 equality cases max dev " + fmt("%.2e", worst_eq);
  o.payload = Json{{"violations", violations}, {"min_slack", number(worst_slack)}, {"equality_dev", number(worst_eq)}};
  return o;
}

Outcome factor_bound() {
  Outcome o;
  std::size_t n = 0, bad = 0;
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double p = -0.01 - 9.99 * i / 99.0;
    for (int j = 0; j < 100; ++j) {
      const double q = p - 10.0 * j / 99.0;
      const double f = bound_factor(make_exponents(p, q));
      worst = std::max(worst, f);
      if (!(f <= 1.0)) ++bad;
      ++n;
    }
  }
  o.pass = n == 10000 && bad == 0;
  o.detail = std::to_string(n) + " points, " + std::to_string(bad) + " violations, max factor " + fmt("%.6f", worst);
  o.payload = Json{{"max", number(worst)}, {"violations", bad}};
  return o;
}

Outcome sphere_areas() {
  Outcome o;
  const double pi = std::numbers::pi;
  const double e1 = rel(sphere_area(HomogeneousGroup::euclidean(1)), 2.0);
  const double e2 = rel(sphere_area(HomogeneousGroup::euclidean(2)), 2.0 * pi);
  const double e3 = rel(sphere_area(HomogeneousGroup::euclidean(3)), 4.0 * pi);
  const auto heis = HomogeneousGroup::heisenberg();
  const double quad = sphere_area(heis);
  const auto mc = sphere_area_mc(heis, 1'000'000, 1);
  const double agree = rel(mc.mean, quad);
  const auto unit = ball_volume_mc(heis, 1.0, 1'000'000, 2);
  double scaling = 0.0;
  for (double s : {0.5, 2.0, 3.0}) {
    const auto v = ball_volume_mc(heis, s, 1'000'000, 3);
    scaling = std::max(scaling, rel(v.mean, std::pow(s, 4.0) * unit.mean));
  }
  o.pass = std::max({e1, e2, e3}) <= 1e-6 && agree <= 5e-3 && scaling <= 1e-2;
  o.detail = "euclidean max dev " + fmt("%.2e", std::max({e1, e2, e3})) + ", heisenberg quad " + fmt("%.6f", quad) +
             " vs MC " + fmt("%.6f", mc.mean) + " (" + fmt("%.2e", agree) + "), dilation dev " + fmt("%.2e", scaling);
  o.payload = Json{{"quad", number(quad)}, {"mc", to_json(mc)}, {"scaling", number(scaling)}};
  return o;
}

SWParams sw_config() { return sw_param_check(PolarSpace::euclidean(1), -1.0, -1.0, -0.3, -0.4); }

Outcome stein_weiss() {
  Outcome o;
  const auto sp = sw_config();
  // composed chain: (2C)^lambda * hardy factor * D of the reduced Hardy inequality
  const auto rh = reduced_hardy(sp, SWCase::A);
  const auto hc = hardy_constant_direct({sp.Q(), sp.space.sphere_area(), rh.u_exponent, rh.v_exponent, sp.exps});
  const double composed = std::pow(2.0 * sp.group().triangle_constant(), sp.lambda) * hc.c_lower;
  const auto lc = sw_lower_constant(sp, SWCase::A);
  const auto rep = verify_sw(sp, sample_sw_family(sp, FamilySpec{10, 7}), SWOptions{});
  bool seeds_agree = rep.pairs.size() == 10;
  std::size_t passes = 0;
  for (const auto& p : rep.pairs) {
    seeds_agree = seeds_agree && p.passes.size() == 2 && p.passes[0] == p.passes[1];
    for (bool b : p.passes) passes += b;
  }
  o.pass = std::abs(sp.lambda + 0.3) < 1e-12 && rel(lc.value, composed) <= 1e-12 && std::abs(composed - 1.0153) < 1e-4 &&
           seeds_agree && passes == 20 && rep.verdict == Verdict::Verified;
  o.detail = "lower " + fmt("%.6f", composed) + ", min ratio " + fmt("%.4f", rep.min_ratio) + ", " +
             std::to_string(passes) + "/20 seed checks pass, verdict " + std::string(to_string(rep.verdict)) +
             (rep.truncated ? ", form on B(0," + fmt("%g", rep.truncation_radius) + ")^2" : "");
  o.payload = to_json(rep);
  return o;
}

Outcome hls_trivial() {
  Outcome o;
  const auto h = hls_param_check(PolarSpace::euclidean(1), -1.0, -2.0);
  const auto rep = verify_sw(h.params, sample_sw_family(h.params, FamilySpec{3, 7}), SWOptions{});
  bool increasing = !rep.divergence.empty();
  for (const auto& d : rep.divergence) increasing = increasing && d.increasing && d.levels.size() == 4;
  o.pass = std::abs(h.derived_lambda + 1.5) < 1e-12 && h.derived_lambda < -1.0 && increasing &&
           rep.verdict == Verdict::TriviallyHolds;
  std::string levels;
  if (!rep.divergence.empty()) {
    for (const auto& l : rep.divergence[0].levels) levels += (levels.empty() ? "" : " < ") + fmt("%.3g", l.estimate.mean);
  }
  o.detail = "lambda " + fmt("%g", h.derived_lambda) + ", excised estimates " + levels + ", verdict " +
             std::string(to_string(rep.verdict));
  o.payload = to_json(rep);
  return o;
}

Outcome proof_chain() {
  Outcome o;
  const auto sp = sw_config();
  const auto fam = sample_sw_family(sp, FamilySpec{20, 13});
  std::size_t held = 0, total = 0;
  Json all = Json::array();
  std::string first_failure;
  for (const auto& pr : fam) {
    const auto steps = chain_check(sp, pr.f, pr.h, SWCase::A);
    for (const auto& s : steps) {
      ++total;
      if (s.holds && !s.skipped) ++held;
      else if (first_failure.empty()) first_failure = s.name + ": " + s.detail;
      all.push_back(to_json(s));
    }
  }
  o.pass = total == 100 && held == total;
  o.detail = std::to_string(held) + "/" + std::to_string(total) + " steps hold over 20 h" +
             (first_failure.empty() ? "" : " (first failure " + first_failure + ")");
  o.payload = all;
  return o;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "closed-form D1", 5, closed_form_direct},
      {2, "closed-form D2", 5, closed_form_conjugate},
      {3, "hardy lower bound", 60, hardy_lower_bound},
      {4, "proof identity", 10, proof_identity},
      {5, "reverse hoelder", 30, reverse_holder},
      {6, "bound factor", 1, factor_bound},
      {7, "sphere areas", 60, sphere_areas},
      {8, "stein-weiss form", 120, stein_weiss},
      {9, "hls trivial regime", 60, hls_trivial},
      {10, "proof chain", 120, proof_chain},
  };
  using clock = std::chrono::steady_clock;
  bool all_pass = true;
  bool deterministic = true;
  std::string det_detail;
  double det_seconds = 0.0;
  for (const auto& c : criteria) {
    Outcome first;
    const auto t0 = clock::now();
    try {
      first = c.run();
    } catch (const Error& e) {
      first.pass = false;
      first.detail = std::string("error: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(clock::now() - t0).count();
    const bool ok = first.pass && secs < c.budget_seconds;
    all_pass = all_pass && ok;
    std::printf("criterion %2d %-20s %s  %7.2f s (< %g s)  %s\n", c.id, c.name, ok ? "PASS" : "FAIL", secs,
                c.budget_seconds, first.detail.c_str());
    std::fflush(stdout);

    const auto t1 = clock::now();
    Outcome again;
    try {
      again = c.run();
    } catch (const Error& e) {
      again.pass = false;
    }
    det_seconds += std::chrono::duration<double>(clock::now() - t1).count();
    if (again.pass != first.pass || again.payload.dump() != first.payload.dump()) {
      deterministic = false;
      det_detail += " " + std::to_string(c.id);
    }
  }
  all_pass = all_pass && deterministic;
  std::printf("criterion 11 %-20s %s  %7.2f s          %s\n", "determinism", deterministic ? "PASS" : "FAIL", det_seconds,
              deterministic ? "criteria 1-10 re-run: identical verdicts and payloads"
                            : ("payload differs for criteria" + det_detail).c_str());
  return all_pass ? 0 : 1;
}
