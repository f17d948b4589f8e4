#pragma once

// Reverse Hardy-Littlewood-Sobolev and Stein-Weiss forms on a homogeneous
// group G of homogeneous dimension Q:
//
//   int int |x|^alpha f(x) |y^-1 x|^lambda h(y) |y|^beta dx dy
//       >= C (int f^q')^(1/q') (int h^p)^(1/p)
//
// with 1/p' + 1/q + (alpha + beta + lambda)/Q = 0.
//
// Finiteness. For piecewise powers f ~ r^a0 | r^a_inf and h ~ r^b0 | r^b_inf
// the form is finite iff
//   at 0:        alpha + a0 + Q > 0,  beta + b0 + Q > 0,
//                alpha + a0 + lambda + b0 + beta + 2Q > 0
//   diagonal:    lambda + Q > 0
//   at infinity: a_inf + alpha + lambda + Q < 0,  b_inf + beta + lambda + Q < 0,
//                alpha + a_inf + lambda + b_inf + beta + 2Q < 0.
// A failure at 0 or on the diagonal makes the form +inf (the inequality holds
// trivially). A failure at infinity is handled by estimating the form on
// B(0,R) x B(0,R), which bounds the full form from below; a ratio verified on
// the truncated form is therefore verified for the full one.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "revhardy/closedform.hpp"
#include "revhardy/errors.hpp"
#include "revhardy/estimate.hpp"
#include "revhardy/exponents.hpp"
#include "revhardy/hardy.hpp"
#include "revhardy/montecarlo.hpp"
#include "revhardy/parallel.hpp"
#include "revhardy/quadrature.hpp"
#include "revhardy/radial.hpp"
#include "revhardy/rng.hpp"
#include "revhardy/spaces.hpp"
#include "revhardy/verdict.hpp"

namespace revhardy {

inline constexpr std::string_view kHlsTrivialWarning =
    "under q < p < 0 the balance condition forces lambda < -Q, so the double integral is +inf for every admissible "
    "(f, h); the inequality holds trivially and no principal-value or truncated reading is assumed";
inline constexpr std::string_view kTailTruncationWarning =
    "the double integral diverges at infinity for these exponents; ratios use the form restricted to "
    "B(0,R) x B(0,R), which bounds the full form from below";

enum class SWCase { A, B };

inline std::string_view to_string(SWCase c) { return c == SWCase::A ? "a" : "b"; }

struct SWParams {
  PolarSpace space = PolarSpace::euclidean(1);
  ExponentPair exps;
  double alpha = 0.0;
  double beta = 0.0;
  double lambda = -1.0;
  bool hls = false;
  bool case_a = false;
  bool case_b = false;
  SWCase active = SWCase::A;
  bool full_form_range = false;  // lambda in (-Q, 0)
  double balance_residual = 0.0;

  double Q() const { return space.homogeneous_dim(); }
  bool diagonal_divergent() const { return !full_form_range; }
  const HomogeneousGroup& group() const {
    if (!space.group()) fail(ErrorKind::InvalidParams, "bilinear forms need a homogeneous group, not " + space.name());
    return *space.group();
  }
};

inline double solve_lambda(double Q, const ExponentPair& e, double alpha, double beta) {
  return -Q * (1.0 / e.p_conj + 1.0 / e.q) - alpha - beta;
}

struct HlsCheck {
  bool valid = false;
  double derived_lambda = 0.0;
  bool diagonal_divergent = false;
  SWParams params;
};

/// Hypotheses of the reverse HLS inequality: q < p < 0 strictly and the
/// balance 1/p' + 1/q + lambda/Q = 0.
inline HlsCheck hls_param_check(const PolarSpace& space, double p, double q, std::optional<double> lambda = {}) {
  if (!std::isfinite(p) || !std::isfinite(q) || !(p < 0.0) || !(q < p)) {
    fail(ErrorKind::InvalidParams, "HLS needs q < p < 0 (got p = " + std::to_string(p) + ", q = " + std::to_string(q) + ")");
  }
  if (!space.group()) fail(ErrorKind::InvalidParams, "HLS needs a homogeneous group, not " + space.name());
  const ExponentPair e = make_exponents(p, q);
  const double Q = space.homogeneous_dim();
  const double lam = solve_lambda(Q, e, 0.0, 0.0);
  if (lambda) {
    const double residual = 1.0 / e.p_conj + 1.0 / e.q + *lambda / Q;
    if (std::abs(residual) > kBalanceTol) {
      fail(ErrorKind::InvalidParams, "lambda violates 1/p' + 1/q + lambda/Q = 0 (residual " + std::to_string(residual) + ")");
    }
  }
  if (!(lam < 0.0)) fail(ErrorKind::InvalidParams, "derived lambda is not negative");
  HlsCheck out;
  out.valid = true;
  out.derived_lambda = lambda.value_or(lam);
  out.diagonal_divergent = out.derived_lambda <= -Q;
  SWParams& sp = out.params;
  sp.space = space;
  sp.exps = e;
  sp.lambda = out.derived_lambda;
  sp.hls = true;
  sp.case_a = 0.0 > -Q / e.p_conj;
  sp.case_b = 0.0 > -Q / e.q;
  sp.active = sp.case_a ? SWCase::A : SWCase::B;
  sp.full_form_range = sp.lambda > -Q;
  sp.balance_residual = 1.0 / e.p_conj + 1.0 / e.q + sp.lambda / Q;
  return out;
}

/// Solves lambda from the Stein-Weiss balance and records the active case.
inline SWParams sw_param_check(const PolarSpace& space, double p, double q, double alpha, double beta) {
  if (!std::isfinite(alpha) || !std::isfinite(beta)) fail(ErrorKind::InvalidParams, "alpha and beta must be finite");
  if (!space.group()) fail(ErrorKind::InvalidParams, "Stein-Weiss needs a homogeneous group, not " + space.name());
  ExponentPair e;
  try {
    e = make_exponents(p, q);
  } catch (const Error& err) {
    fail(ErrorKind::InvalidParams, err.what());
  }
  SWParams sp;
  sp.space = space;
  sp.exps = e;
  sp.alpha = alpha;
  sp.beta = beta;
  const double Q = space.homogeneous_dim();
  sp.lambda = solve_lambda(Q, e, alpha, beta);
  if (!(sp.lambda < 0.0)) fail(ErrorKind::InvalidParams, "balance gives lambda = " + std::to_string(sp.lambda) + " >= 0");
  sp.case_a = beta > -Q / e.p_conj;
  sp.case_b = alpha > -Q / e.q;
  if (!sp.case_a && !sp.case_b) {
    fail(ErrorKind::InvalidParams, "neither (a) beta > -Q/p' nor (b) alpha > -Q/q holds");
  }
  sp.active = sp.case_a ? SWCase::A : SWCase::B;
  sp.full_form_range = sp.lambda > -Q;
  sp.balance_residual = 1.0 / e.p_conj + 1.0 / e.q + (alpha + beta + sp.lambda) / Q;
  return sp;
}

// ---------------------------------------------------------------------------
// Finiteness and sampling

struct Condition {
  std::string name;
  bool holds = false;
};

struct Finiteness {
  std::vector<Condition> local;     // at 0
  std::vector<Condition> diagonal;  // lambda + Q > 0
  std::vector<Condition> tail;      // at infinity

  static bool all(const std::vector<Condition>& cs) {
    return std::all_of(cs.begin(), cs.end(), [](const Condition& c) { return c.holds; });
  }
  bool finite() const { return all(local) && all(diagonal) && all(tail); }
  std::vector<std::string> failed() const {
    std::vector<std::string> out;
    for (const auto* group : {&local, &diagonal, &tail}) {
      for (const auto& c : *group) {
        if (!c.holds) out.push_back(c.name);
      }
    }
    return out;
  }
};

inline Finiteness form_finiteness(const SWParams& sp, const PiecewisePowerFunction& f, const PiecewisePowerFunction& h) {
  const double Q = sp.Q();
  const double a = sp.alpha, b = sp.beta, l = sp.lambda;
  Finiteness out;
  out.local = {{"alpha + a0 + Q > 0", a + f.s0 + Q > 0.0},
               {"beta + b0 + Q > 0", b + h.s0 + Q > 0.0},
               {"alpha + a0 + lambda + b0 + beta + 2Q > 0", a + f.s0 + l + h.s0 + b + 2.0 * Q > 0.0}};
  out.diagonal = {{"lambda + Q > 0", l + Q > 0.0}};
  out.tail = {{"a_inf + alpha + lambda + Q < 0", f.s_inf + a + l + Q < 0.0},
              {"b_inf + beta + lambda + Q < 0", h.s_inf + b + l + Q < 0.0},
              {"alpha + a_inf + lambda + b_inf + beta + 2Q < 0", a + f.s_inf + l + h.s_inf + b + 2.0 * Q < 0.0}};
  return out;
}

struct McSpec {
  std::uint64_t samples = 400'000;
  std::uint64_t seed = 1;
  double truncation_radius = 10.0;
  PairSampler::Mode mode = PairSampler::Mode::KernelAdapted;
  bool unit_kernel = false;        // diagnostic: replace |y^-1 x|^lambda by 1
  bool euclidean_kernel = false;   // evaluate |x - y|_E from coordinates instead of the group law
  double excision = 0.0;           // drop pairs with |y^-1 x| < excision
  unsigned threads = 0;
};

struct FormResult {
  bool divergent = false;  // certified +inf
  std::string reason;
  MCEstimate estimate;
  bool truncated = false;
  double truncation_radius = kInf;
  std::vector<std::string> failed_conditions;

  double value() const { return divergent ? kInf : estimate.mean; }
};

namespace detail {

inline double euclidean_distance(const Point& x, const Point& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
  return std::sqrt(s);
}

}  // namespace detail

/// The double integral: a certified divergence flag, or a Monte Carlo
/// estimate (on B(0,R) x B(0,R) when a tail condition fails).
inline FormResult sw_form(const SWParams& sp, const PiecewisePowerFunction& f, const PiecewisePowerFunction& h,
                          const McSpec& mc) {
  const auto& g = sp.group();
  const double Q = sp.Q();
  const auto fin = form_finiteness(sp, f, h);
  FormResult out;
  out.failed_conditions = fin.failed();
  if (!Finiteness::all(fin.diagonal) && mc.excision <= 0.0) {
    out.divergent = true;
    out.reason = "lambda <= -Q: the kernel is not integrable across the diagonal";
    return out;
  }
  if (!Finiteness::all(fin.local)) {
    out.divergent = true;
    out.reason = "integrand is not integrable at the origin";
    return out;
  }
  const bool truncate = !Finiteness::all(fin.tail) || mc.excision > 0.0;
  const double R = truncate ? mc.truncation_radius : kInf;
  if (truncate && !(R > 0.0 && std::isfinite(R))) fail(ErrorKind::ConfigError, "truncation radius must be positive and finite");
  out.truncated = truncate;
  out.truncation_radius = R;

  const double a = sp.alpha, b = sp.beta, l = sp.lambda;
  const double tail_l = truncate ? 0.0 : l;
  const RadialSampler rx(a + f.s0 + Q - 1.0, a + f.s_inf + tail_l + Q - 1.0, 0.0, R);
  const RadialSampler ry(b + h.s0 + Q - 1.0, b + h.s_inf + tail_l + Q - 1.0, 0.0, R);
  PairSampler sampler = PairSampler::product(g, rx, ry);
  if (mc.mode == PairSampler::Mode::KernelAdapted) {
    const double w_min = mc.excision;
    const double w_max = truncate ? 2.0 * g.triangle_constant() * R : kInf;
    const double w0 = mc.unit_kernel ? Q - 1.0 : l + Q - 1.0;
    const double w_inf =
        truncate ? w0 : std::max(l + b + h.s_inf, l + a + f.s_inf) + Q - 1.0;
    sampler = PairSampler::kernel_adapted(g, rx, ry, RadialSampler(w0, w_inf, w_min, w_max));
  }

  auto integrand = [&](const Point& x, const Point& y) {
    const double nx = g.norm(x);
    const double ny = g.norm(y);
    if (nx >= R || ny >= R || nx <= 0.0 || ny <= 0.0) return 0.0;
    const double d = mc.euclidean_kernel ? detail::euclidean_distance(x, y) : g.kernel_norm(x, y);
    if (d < mc.excision || d <= 0.0) return 0.0;
    const double k = mc.unit_kernel ? 1.0 : std::pow(d, l);
    return std::pow(nx, a) * f(nx) * k * h(ny) * std::pow(ny, b);
  };
  out.estimate = mc_pair_integrate(integrand, sampler, mc.samples, mc.seed, mc.threads);
  return out;
}

/// (int f^e)^(1/e) for e < 1, e != 0.
inline double counter_norm(const PolarSpace& space, const RadialFunction& f, double e, const QuadratureConfig& cfg = {}) {
  if (!(e < 1.0) || e == 0.0) fail(ErrorKind::InvalidParams, "counter_norm exponent must be below 1 and non-zero");
  if (e < 0.0 && !f.covers(0.0, space.radius_limit())) {
    fail(ErrorKind::DivergentIntegral, "int f^e diverges for e < 0: f vanishes on a set of positive measure");
  }
  const double v = polar_integrate(space, f.pow(e), 0.0, kInf, cfg);
  if (!(v > 0.0) || !std::isfinite(v)) fail(ErrorKind::DivergentIntegral, "int f^e is not finite and positive");
  return std::pow(v, 1.0 / e);
}

/// (int z^p |y|^w dy)^(1/p).
inline double weighted_counter_norm(const PolarSpace& space, const RadialFunction& z, double p, double w,
                                    const QuadratureConfig& cfg = {}) {
  return counter_norm(space, z * RadialFunction::power(w / p), p, cfg);
}

/// z = h |y|^shift; shift = beta in case (a), beta + lambda in case (b).
inline PiecewisePowerFunction translate_weight(const PiecewisePowerFunction& h, double shift) {
  return h.times_power(shift);
}

/// Weights of the Hardy inequality the proof reduces to.
struct ReducedHardy {
  bool conjugate = false;
  double u_exponent = 0.0;  // u = |x|^u_exponent
  double v_exponent = 0.0;  // v = |y|^v_exponent
  double shift = 0.0;       // z = h |y|^shift
};

inline ReducedHardy reduced_hardy(const SWParams& sp, SWCase c) {
  const auto& e = sp.exps;
  if (c == SWCase::A) return {false, (sp.alpha + sp.lambda) * e.q, -sp.beta * e.p, sp.beta};
  return {true, sp.alpha * e.q, -(sp.beta + sp.lambda) * e.p, sp.beta + sp.lambda};
}

struct LowerConstant {
  double value = 0.0;
  double D = 0.0;
  double kernel_factor = 0.0;  // (2C)^lambda
  double hardy_factor = 0.0;   // |p|^(1/q) (p')^(1/p')
};

/// (2C)^lambda |p|^(1/q) (p')^(1/p') D, with D the closed-form constant of the
/// reduced (conjugate) Hardy inequality.
inline LowerConstant sw_lower_constant(const SWParams& sp, SWCase c) {
  const double Q = sp.Q();
  const double S = sp.space.sphere_area();
  const auto& e = sp.exps;
  double D;
  if (c == SWCase::A) {
    const double s1 = Q + (sp.alpha + sp.lambda) * e.q;
    const double s2 = sp.beta * e.p_conj + Q;
    if (!(s1 > kBoundaryExponentTol)) fail(ErrorKind::InadmissibleExponent, "case (a) needs Q + (alpha+lambda) q > 0");
    if (!(s2 > kBoundaryExponentTol)) fail(ErrorKind::InadmissibleExponent, "case (a) needs beta p' + Q > 0");
    D = std::pow(S / s1, 1.0 / e.q) * std::pow(S / s2, 1.0 / e.p_conj);
  } else {
    const double s1 = Q + sp.alpha * e.q;
    const double s2 = (sp.beta + sp.lambda) * e.p_conj + Q;
    if (!(s1 < -kBoundaryExponentTol)) fail(ErrorKind::InadmissibleExponent, "case (b) needs Q + alpha q < 0");
    if (!(s2 < -kBoundaryExponentTol)) fail(ErrorKind::InadmissibleExponent, "case (b) needs (beta+lambda) p' + Q < 0");
    D = std::pow(S / -s1, 1.0 / e.q) * std::pow(S / -s2, 1.0 / e.p_conj);
  }
  LowerConstant out;
  out.D = D;
  out.kernel_factor = std::pow(2.0 * sp.group().triangle_constant(), sp.lambda);
  out.hardy_factor = bound_factor(e);
  out.value = out.kernel_factor * out.hardy_factor * D;
  return out;
}

/// The larger admissible lower constant over the cases that hold.
inline std::optional<std::pair<SWCase, LowerConstant>> best_lower_constant(const SWParams& sp) {
  std::optional<std::pair<SWCase, LowerConstant>> best;
  for (SWCase c : {SWCase::A, SWCase::B}) {
    if ((c == SWCase::A && !sp.case_a) || (c == SWCase::B && !sp.case_b)) continue;
    try {
      const auto lc = sw_lower_constant(sp, c);
      if (!best || lc.value > best->second.value) best = std::make_pair(c, lc);
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::InadmissibleExponent) throw;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Families of (f, h)

struct SWWindows {
  ExponentWindow a0, a_inf, b0, b_inf;
  bool tail_divergent = false;  // every admissible pair diverges at infinity
};

/// Exponent windows making int f^q' and int h^p finite and the form locally
/// integrable; tail conditions are added when they leave a non-empty window.
inline SWWindows sw_windows(const SWParams& sp) {
  const double Q = sp.Q();
  const auto& e = sp.exps;
  const double a = sp.alpha, b = sp.beta, l = sp.lambda;
  SWWindows w;
  const double a0_lo = std::max(-Q / e.q_conj, -a - Q);
  w.a0 = {a0_lo, a0_lo + kWindowCap, false, true};
  double ai_hi = -Q / e.q_conj;
  const double ai_tail = -a - l - Q;
  bool tail_ok = true;
  if (ai_tail < ai_hi) ai_hi = ai_tail;
  w.a_inf = {ai_hi - kWindowCap, ai_hi, true, false};
  w.b0 = {-b - Q, -Q / e.p, false, false};
  const double bi_lo = std::max(-Q / e.p, -b - Q);
  const double bi_tail = -b - l - Q;
  if (bi_tail > bi_lo + 1e-9) {
    w.b_inf = {bi_lo, bi_tail, false, false};
  } else {
    w.b_inf = {bi_lo, bi_lo + kWindowCap, false, true};
    tail_ok = false;
  }
  w.tail_divergent = !tail_ok;
  if (!(w.b0.width() > 0.0)) fail(ErrorKind::InadmissibleWeights, "no exponent b0 gives 0 < int h^p with h |y|^beta locally integrable");
  return w;
}

struct SWPair {
  PiecewisePowerFunction f;
  PiecewisePowerFunction h;
};

/// Seeded pairs inside the windows. Pairs are redrawn until the joint
/// condition at the origin holds with slack; the slack also keeps the
/// importance weights square integrable in the corner x, y -> 0.
inline std::vector<SWPair> sample_sw_family(const SWParams& sp, const FamilySpec& spec) {
  const SWWindows w = sw_windows(sp);
  const double Q = sp.Q();
  CounterRng rng(spec.seed, 0x73772d66616dULL);
  auto draw = [&](const ExponentWindow& win) {
    const double m = spec.margin * win.width();
    return rng.uniform(win.lo + m, win.hi - m);
  };
  auto radius = [&] { return std::exp(rng.uniform(std::log(spec.r_lo), std::log(spec.r_hi))); };
  std::vector<SWPair> out;
  out.reserve(spec.count);
  for (std::size_t i = 0; i < spec.count; ++i) {
    bool done = false;
    for (int attempt = 0; attempt < 10000 && !done; ++attempt) {
      const double a0 = draw(w.a0), ai = draw(w.a_inf), b0 = draw(w.b0), bi = draw(w.b_inf);
      const double fx = sp.alpha + a0, hy = sp.beta + b0;
      const double joint = fx + hy + sp.lambda + 2.0 * Q;
      if (joint < 0.1 * Q) continue;
      if (joint + std::min(fx, hy) < 0.1 * Q) continue;
      if (!w.tail_divergent && sp.alpha + ai + sp.lambda + bi + sp.beta + 2.0 * Q >= 0.0) continue;
      out.push_back({PiecewisePowerFunction(a0, ai, radius()), PiecewisePowerFunction(b0, bi, radius())});
      done = true;
    }
    if (!done) fail(ErrorKind::InadmissibleWeights, "could not draw an admissible (f, h) pair");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Proof chain

struct ChainStep {
  std::string name;
  bool holds = false;
  bool skipped = false;
  std::string detail;
};

struct ChainOptions {
  QuadratureConfig quad{1e-9, 1e-14};
  double truncation_radius = 10.0;
  std::size_t kernel_pairs = 10'000;
  std::uint64_t seed = 1;
  std::vector<double> radii = log_grid(1e-2, 1e2, 17);
  double tol = 1e-6;
};

namespace detail {

/// On R^1 with z radial: int_{lo < |y| < hi} |x - y|^lambda z(|y|) dy for x > 0.
inline double line_kernel_integral(double x, const PiecewisePowerFunction& z, double lambda, double lo, double hi,
                                   const QuadratureConfig& cfg) {
  if (!(hi > lo)) return 0.0;
  auto g = [&](double s) { return (std::pow(x + s, lambda) + std::pow(std::abs(x - s), lambda)) * z(s); };
  std::vector<Singularity> sing{{x, lambda}, {z.R, 0.0}};
  EndpointHints hints;
  if (lo == 0.0) hints.at_zero = z.s0;
  if (hi == kInf) hints.at_infinity = z.s_inf + lambda;
  return integrate(g, lo, hi, cfg, hints, sing).value;
}

inline std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace detail

/// Numerical checks of each inequality in the reduction of the bilinear form
/// to a Hardy inequality, for one h (and one f for the Hoelder step).
inline std::vector<ChainStep> chain_check(const SWParams& sp, const PiecewisePowerFunction& f,
                                          const PiecewisePowerFunction& h, SWCase c, const ChainOptions& opt = {}) {
  const auto& g = sp.group();
  const auto& e = sp.exps;
  const double l = sp.lambda;
  const double C = g.triangle_constant();
  const bool line = g.kind() == HomogeneousGroup::Kind::Abelian && g.dim() == 1;
  const auto rh = reduced_hardy(sp, c);
  const PiecewisePowerFunction z = translate_weight(h, rh.shift);
  std::vector<ChainStep> steps;

  // (1) Reverse Hoelder in x on B(0,R):
  //   int f I >= (int I^q)^(1/q) (int f^q')^(1/q'),  I(x) = |x|^alpha int_{B(0,R)} K h |y|^beta dy.
  {
    ChainStep s{"reverse_holder_reduction"};
    if (!line) {
      s.skipped = true;
      s.holds = true;
      s.detail = "deterministic reduction check runs on euclidean:1 only";
    } else {
      const double R = opt.truncation_radius;
      const PiecewisePowerFunction hb = h.times_power(sp.beta);
      auto I = [&](double x) { return std::pow(x, sp.alpha) * detail::line_kernel_integral(x, hb, l, 0.0, R, opt.quad); };
      std::vector<Singularity> sing{{hb.R, l + 1.0}, {f.R, 0.0}};
      std::erase_if(sing, [&](const Singularity& q) { return !(q.at < R); });
      sing.push_back({R, l + 1.0});
      const QuadratureConfig outer{1e-8, 1e-14, 4000};
      const double lhs = 2.0 * integrate([&](double x) { return f(x) * I(x); }, 0.0, R, outer,
                                         {sp.alpha + f.s0 + std::min(0.0, hb.s0 + l + 1.0), {}}, sing).value;
      const double iq = 2.0 * integrate([&](double x) { return std::pow(I(x), e.q); }, 0.0, R, outer,
                                        {e.q * (sp.alpha + std::min(0.0, hb.s0 + l + 1.0)), {}}, sing).value;
      const double fq = 2.0 * integrate([&](double x) { return std::pow(f(x), e.q_conj); }, 0.0, R, outer,
                                        {f.s0 * e.q_conj, {}}, sing).value;
      const double rhs = std::pow(iq, 1.0 / e.q) * std::pow(fq, 1.0 / e.q_conj);
      s.holds = lhs >= rhs * (1.0 - opt.tol);
      s.detail = "lhs " + detail::fmt(lhs) + " >= rhs " + detail::fmt(rhs) + " on B(0," + detail::fmt(R) + ")";
    }
    steps.push_back(s);
  }

  // (2) Restriction of the inner integral to B(0,|x|) (case a) or its
  // complement (case b), and the flip under the power q < 0.
  {
    ChainStep s{c == SWCase::A ? "ball_restriction" : "complement_restriction"};
    if (!line) {
      s.skipped = true;
      s.holds = true;
      s.detail = "deterministic restriction check runs on euclidean:1 only";
    } else {
      const PiecewisePowerFunction hb = h.times_power(sp.beta);
      bool ok = true;
      double worst = kInf;
      std::size_t infinite = 0;
      for (double x : opt.radii) {
        double full;
        try {
          full = detail::line_kernel_integral(x, hb, l, 0.0, kInf, opt.quad);
        } catch (const Error& err) {
          if (err.kind() != ErrorKind::DivergentIntegral) throw;
          full = kInf;
          ++infinite;
        }
        const double part = c == SWCase::A ? detail::line_kernel_integral(x, hb, l, 0.0, x, opt.quad)
                                           : detail::line_kernel_integral(x, hb, l, x, kInf, opt.quad);
        const double full_q = std::isinf(full) ? 0.0 : std::pow(full, e.q);
        const double part_q = std::pow(part, e.q);
        ok = ok && full >= part * (1.0 - opt.tol) && full_q <= part_q * (1.0 + opt.tol);
        worst = std::min(worst, std::isinf(full) ? kInf : full / part);
      }
      s.holds = ok;
      s.detail = "min full/restricted " + detail::fmt(worst) + " over " + std::to_string(opt.radii.size()) + " radii";
      if (infinite > 0) s.detail += "; full inner integral +inf at " + std::to_string(infinite) + " radii";
    }
    steps.push_back(s);
  }

  // (3) Kernel comparison |y^-1 x|^lambda >= (2C)^lambda max(|x|,|y|)^lambda.
  {
    ChainStep s{"kernel_bound"};
    const PointSampler ps(g, RadialSampler(0.0, -2.0));
    CounterRng rng(opt.seed, 0x6b6572);
    std::size_t violations = 0;
    for (std::size_t i = 0; i < opt.kernel_pairs; ++i) {
      Point x = ps.sample(rng);
      Point y = ps.sample(rng);
      // case (a) needs |y| <= |x|, case (b) |x| <= |y|
      if ((g.norm(y) > g.norm(x)) == (c == SWCase::A)) std::swap(x, y);
      const double big = c == SWCase::A ? g.norm(x) : g.norm(y);
      const double k = std::pow(g.kernel_norm(x, y), l);
      if (k < std::pow(2.0 * C * big, l) * (1.0 - 1e-12)) ++violations;
    }
    s.holds = violations == 0;
    s.detail = std::to_string(violations) + " violations on " + std::to_string(opt.kernel_pairs) + " pairs";
    steps.push_back(s);
  }

  // (4) Reduced Hardy inequality for z with the substituted weights.
  {
    ChainStep s{c == SWCase::A ? "reduced_hardy" : "reduced_conjugate_hardy"};
    const auto lc = sw_lower_constant(sp, c);
    const double c_lower = lc.hardy_factor * lc.D;
    const WeightPair w = WeightPair::powers(rh.u_exponent, rh.v_exponent);
    const double ratio = rh.conjugate ? conjugate_hardy_ratio(sp.space, z.radial(), w, e, opt.quad)
                                      : hardy_ratio(sp.space, z.radial(), w, e, opt.quad);
    s.holds = ratio >= c_lower * (1.0 - opt.tol);
    s.detail = "ratio " + detail::fmt(ratio) + " >= c_lower " + detail::fmt(c_lower);
    steps.push_back(s);
  }

  // (5) Weight translation: (int z^p |y|^(-shift p))^(1/p) = (int h^p)^(1/p).
  {
    ChainStep s{"weight_translation"};
    const double a = weighted_counter_norm(sp.space, z.radial(), e.p, -rh.shift * e.p, opt.quad);
    const double b = counter_norm(sp.space, h.radial(), e.p, opt.quad);
    const double rel = std::abs(a - b) / std::abs(b);
    s.holds = rel <= 1e-8;
    s.detail = "relative difference " + detail::fmt(rel);
    steps.push_back(s);
  }
  return steps;
}

// ---------------------------------------------------------------------------
// Verification

struct PairResult {
  std::string f;
  std::string h;
  std::vector<FormResult> forms;  // one per seed
  double rhs = 0.0;               // counter_norm(f, q') counter_norm(h, p)
  std::vector<double> ratios;
  std::vector<bool> passes;
  std::vector<ChainStep> chain;
  std::string error;
};

struct RefinementLevel {
  double excision = 0.0;
  MCEstimate estimate;
};

struct DivergenceEvidence {
  std::string f;
  std::string h;
  std::vector<RefinementLevel> levels;
  bool increasing = false;
};

struct BilinearReport {
  SWParams params;
  std::optional<SWCase> lower_case;
  double constructive_lower = std::numeric_limits<double>::quiet_NaN();
  LowerConstant lower_detail;
  std::vector<PairResult> pairs;
  std::vector<DivergenceEvidence> divergence;
  double min_ratio = kInf;
  bool truncated = false;
  double truncation_radius = kInf;
  Verdict verdict = Verdict::Inconclusive;
  std::vector<std::string> diagnostics;
  std::vector<std::string> warnings;
};

struct SWOptions {
  McSpec mc;
  std::size_t seeds = 2;
  bool run_chain = true;
  ChainOptions chain;
  QuadratureConfig quad;
  // Divergence certificate: excision radii eps0 / 4^k, k < levels.
  double excision0 = 0.1;
  std::size_t refinement_levels = 4;
  std::uint64_t refinement_samples = 200'000;
};

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t k) {
  return k == 0 ? seed : detail::mix64(seed ^ (0x9e3779b97f4a7c15ULL * k));
}

/// Estimates of the diagonal-excised form for shrinking excision radii; a
/// divergent form grows like eps^(lambda + Q) beyond the noise.
inline DivergenceEvidence divergence_certificate(const SWParams& sp, const SWPair& pr, const SWOptions& opt) {
  DivergenceEvidence ev;
  ev.f = pr.f.describe();
  ev.h = pr.h.describe();
  McSpec mc = opt.mc;
  mc.samples = opt.refinement_samples;
  double eps = opt.excision0;
  for (std::size_t k = 0; k < opt.refinement_levels; ++k) {
    mc.excision = eps;
    mc.seed = derive_seed(opt.mc.seed, 100 + k);
    ev.levels.push_back({eps, sw_form(sp, pr.f, pr.h, mc).estimate});
    eps /= 4.0;
  }
  ev.increasing = ev.levels.size() >= 2;
  for (std::size_t k = 0; k + 1 < ev.levels.size(); ++k) {
    const auto& a = ev.levels[k].estimate;
    const auto& b = ev.levels[k + 1].estimate;
    const double noise = 3.0 * std::hypot(a.std_error, b.std_error);
    if (!(b.mean - a.mean > noise)) ev.increasing = false;
  }
  return ev;
}

inline BilinearReport verify_sw(const SWParams& sp, const std::vector<SWPair>& family, const SWOptions& opt = {}) {
  BilinearReport rep;
  rep.params = sp;
  if (opt.seeds < 2) fail(ErrorKind::ConfigError, "ratio verdicts need at least two seeds");
  if (family.empty()) fail(ErrorKind::ConfigError, "empty (f, h) family");

  if (sp.diagonal_divergent()) {
    if (sp.hls) rep.warnings.emplace_back(kHlsTrivialWarning);
    rep.diagnostics.push_back("lambda = " + detail::fmt(sp.lambda) + " <= -Q = " + detail::fmt(-sp.Q()) +
                              ": the kernel is not integrable across the diagonal");
    bool all_increasing = true;
    for (const auto& pr : family) {
      rep.divergence.push_back(divergence_certificate(sp, pr, opt));
      all_increasing = all_increasing && rep.divergence.back().increasing;
    }
    rep.truncated = true;
    rep.truncation_radius = opt.mc.truncation_radius;
    rep.verdict = all_increasing ? Verdict::TriviallyHolds : Verdict::Inconclusive;
    if (!all_increasing) rep.diagnostics.emplace_back("excised estimates did not grow beyond noise at every refinement");
    return rep;
  }

  const auto best = best_lower_constant(sp);
  if (best) {
    rep.lower_case = best->first;
    rep.lower_detail = best->second;
    rep.constructive_lower = best->second.value;
  } else {
    rep.diagnostics.emplace_back("no case has admissible reduced-Hardy exponents; no constructive lower constant");
  }

  const std::size_t n_jobs = family.size() * opt.seeds;
  // Forms are computed sequentially per job with the inner sampler parallel,
  // so the result does not depend on how jobs are scheduled.
  std::vector<FormResult> forms(n_jobs);
  std::vector<std::string> form_errors(n_jobs);
  for (std::size_t j = 0; j < n_jobs; ++j) {
    const auto& pr = family[j / opt.seeds];
    McSpec mc = opt.mc;
    mc.seed = derive_seed(opt.mc.seed, j % opt.seeds);
    try {
      forms[j] = sw_form(sp, pr.f, pr.h, mc);
    } catch (const Error& err) {
      form_errors[j] = err.what();
    }
  }

  auto chains = parallel_map(
      family.size(),
      [&](std::size_t i) -> std::pair<std::vector<ChainStep>, std::string> {
        if (!opt.run_chain || !rep.lower_case) return {};
        try {
          return {chain_check(sp, family[i].f, family[i].h, *rep.lower_case, opt.chain), {}};
        } catch (const Error& err) {
          return {{}, err.what()};
        }
      },
      opt.mc.threads);

  bool any_fail_all = false;
  bool any_disagree = false;
  bool any_error = false;
  bool chain_ok = true;
  for (std::size_t i = 0; i < family.size(); ++i) {
    PairResult pr;
    pr.f = family[i].f.describe();
    pr.h = family[i].h.describe();
    try {
      pr.rhs = counter_norm(sp.space, family[i].f.radial(), sp.exps.q_conj, opt.quad) *
               counter_norm(sp.space, family[i].h.radial(), sp.exps.p, opt.quad);
    } catch (const Error& err) {
      pr.error = err.what();
    }
    std::size_t passed = 0;
    for (std::size_t k = 0; k < opt.seeds; ++k) {
      const std::size_t j = i * opt.seeds + k;
      if (!form_errors[j].empty()) {
        pr.error = form_errors[j];
        continue;
      }
      const FormResult& fr = forms[j];
      pr.forms.push_back(fr);
      if (fr.truncated) {
        rep.truncated = true;
        rep.truncation_radius = fr.truncation_radius;
      }
      if (!pr.error.empty() || !rep.lower_case) continue;
      const double ratio = fr.value() / pr.rhs;
      const double rel = fr.divergent ? 0.0 : fr.estimate.relative_error();
      const bool pass = ratio >= rep.constructive_lower * (1.0 - 3.0 * rel);
      pr.ratios.push_back(ratio);
      pr.passes.push_back(pass);
      rep.min_ratio = std::min(rep.min_ratio, ratio);
      if (pass) ++passed;
    }
    pr.chain = chains[i].first;
    if (!chains[i].second.empty()) {
      rep.diagnostics.push_back("chain check for " + pr.h + " failed: " + chains[i].second);
      chain_ok = false;
    }
    for (const auto& st : pr.chain) {
      if (!st.holds) {
        chain_ok = false;
        rep.diagnostics.push_back("chain step " + st.name + " fails for " + pr.h + ": " + st.detail);
      }
    }
    if (!pr.error.empty()) {
      any_error = true;
      rep.diagnostics.push_back("pair (" + pr.f + ", " + pr.h + "): " + pr.error);
    } else if (pr.passes.size() == opt.seeds) {
      if (passed == 0) any_fail_all = true;
      if (passed != 0 && passed != opt.seeds) any_disagree = true;
    }
    rep.pairs.push_back(std::move(pr));
  }
  if (rep.truncated) rep.warnings.emplace_back(kTailTruncationWarning);
  if (any_disagree) rep.diagnostics.emplace_back("seeds disagree on at least one pair");

  if (!rep.lower_case || any_error) {
    rep.verdict = Verdict::Inconclusive;
  } else if (any_fail_all) {
    rep.verdict = Verdict::Violated;
  } else if (any_disagree || !chain_ok) {
    rep.verdict = Verdict::Inconclusive;
  } else {
    rep.verdict = Verdict::Verified;
  }
  return rep;
}

}  // namespace revhardy
