#pragma once

// Reverse Hardy inequalities with q <= p < 0 on a polar space X:
//
//   [int_X (int_{B(0,|x|)} f)^q u dx]^(1/q) >= C (int_X f^p v dx)^(1/p)
//
// and the conjugate form with the inner integral over X \ B(0,|x|). The best
// constant is bracketed by D and |p|^(1/q) (p')^(1/p') D, where D is the
// infimum of
//
//   D1(t) = (int_{B(0,t)} u)^(1/q) (int_{B(0,t)} v^(1-p'))^(1/p')
//
// (complements of balls for D2). The engine evaluates both sides by nested
// adaptive quadrature, probes the lower bound with parametric families and
// the upper bound with a near-extremal family.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "revhardy/closedform.hpp"
#include "revhardy/errors.hpp"
#include "revhardy/exponents.hpp"
#include "revhardy/parallel.hpp"
#include "revhardy/quadrature.hpp"
#include "revhardy/radial.hpp"
#include "revhardy/rng.hpp"
#include "revhardy/spaces.hpp"
#include "revhardy/verdict.hpp"

namespace revhardy {

inline constexpr std::string_view kExtremalDirectionWarning =
    "extremal family uses amplitude A -> infinity: with p < 0 the tail term A^p int v f1^p vanishes only as A grows, "
    "so the upper-bound limit is taken in that direction rather than A -> 0";
inline constexpr std::string_view kNonMonotoneWarning =
    "profile is not monotone in t; the monotonicity hypothesis fails and no bound is asserted";

/// Weight x -> w(|x|); `power` is set for w = |x|^gamma.
struct RadialWeight {
  RadialFunction fn = RadialFunction::constant(1.0);
  std::optional<double> power = 0.0;

  static RadialWeight power_weight(double gamma) { return {RadialFunction::power(gamma), gamma}; }
  static RadialWeight callable(RadialFunction f) { return {std::move(f), std::nullopt}; }

  std::string describe() const { return power ? "|x|^" + RadialFunction::format_number(*power) : fn.description(); }
};

struct WeightPair {
  RadialWeight u;
  RadialWeight v;

  static WeightPair powers(double alpha, double beta) {
    return {RadialWeight::power_weight(alpha), RadialWeight::power_weight(beta)};
  }
};

enum class Monotonicity { NonDecreasing, NonIncreasing, Neither };

inline std::string_view to_string(Monotonicity m) {
  switch (m) {
    case Monotonicity::NonDecreasing: return "non_decreasing";
    case Monotonicity::NonIncreasing: return "non_increasing";
    case Monotonicity::Neither: return "neither";
  }
  return "neither";
}

inline constexpr double kMonotoneSlack = 1e-9;

struct DProfile {
  bool conjugate = false;  // D2 (complements) rather than D1 (balls)
  std::vector<double> radii;
  std::vector<double> values;
  double infimum = kInf;
  std::size_t argmin = 0;
  Monotonicity monotone = Monotonicity::Neither;
  bool constant = false;  // monotone both ways at the slack
  std::vector<std::string> warnings;

  double spread() const {
    if (values.empty()) return 0.0;
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    return (*hi - *lo) / std::abs(*lo);
  }
};

/// Successive-difference classification with relative slack; a constant
/// profile reports the expected direction.
inline void classify_profile(DProfile& prof) {
  bool up = true;
  bool down = true;
  for (std::size_t i = 0; i + 1 < prof.values.size(); ++i) {
    const double a = prof.values[i];
    const double b = prof.values[i + 1];
    const double slack = kMonotoneSlack * std::max(std::abs(a), std::abs(b));
    if (b - a < -slack) up = false;
    if (b - a > slack) down = false;
  }
  prof.constant = up && down;
  const Monotonicity expected = prof.conjugate ? Monotonicity::NonIncreasing : Monotonicity::NonDecreasing;
  if (prof.constant) {
    prof.monotone = expected;
  } else if (up) {
    prof.monotone = Monotonicity::NonDecreasing;
  } else if (down) {
    prof.monotone = Monotonicity::NonIncreasing;
  } else {
    prof.monotone = Monotonicity::Neither;
  }

  prof.infimum = kInf;
  for (std::size_t i = 0; i < prof.values.size(); ++i) {
    if (prof.values[i] < prof.infimum) {
      prof.infimum = prof.values[i];
      prof.argmin = i;
    }
  }
  if (!prof.constant && !prof.values.empty() && (prof.argmin == 0 || prof.argmin + 1 == prof.values.size())) {
    prof.warnings.push_back("profile infimum attained at the grid edge t = " +
                            RadialFunction::format_number(prof.radii[prof.argmin]) +
                            "; the true infimum may lie outside the grid");
  }
  if (prof.monotone == Monotonicity::Neither) prof.warnings.emplace_back(kNonMonotoneWarning);
}

inline std::vector<double> default_profile_grid() { return log_grid(1e-3, 1e3, 64); }

/// Breakpoints used for the cached inner integrals of the ratio engine.
inline std::vector<double> default_inner_grid() { return log_grid(1e-8, 1e8, 49); }

namespace detail {

inline double local_dim(const PolarSpace& space) { return space.density_exponent_at_zero() + 1.0; }

inline void check_power_weights(const PolarSpace& space, const WeightPair& w, const ExponentPair& e, bool conjugate) {
  const double dual = 1.0 - e.p_conj;
  if (!conjugate) {
    const double n0 = local_dim(space);
    if (w.u.power && !(*w.u.power + n0 > 0.0)) {
      fail(ErrorKind::InadmissibleWeights, "int_B u diverges: alpha + Q must be positive");
    }
    if (w.v.power && !(*w.v.power * dual + n0 > 0.0)) {
      fail(ErrorKind::InadmissibleWeights, "int_B v^(1-p') diverges: beta(1-p') + Q must be positive");
    }
    return;
  }
  if ((w.u.power || w.v.power) && !space.power_law()) {
    fail(ErrorKind::InadmissibleWeights, "complement integrals of power weights diverge on " + space.name());
  }
  const auto dinf = space.density_exponent_at_infinity();
  const double ninf = dinf ? *dinf + 1.0 : 0.0;
  if (w.u.power && !(*w.u.power + ninf < 0.0)) {
    fail(ErrorKind::InadmissibleWeights, "int_{X\\B} u diverges: alpha + Q must be negative");
  }
  if (w.v.power && !(*w.v.power * dual + ninf < 0.0)) {
    fail(ErrorKind::InadmissibleWeights, "int_{X\\B} v^(1-p') diverges: beta(1-p') + Q must be negative");
  }
}

inline CumulativeIntegral::Direction direction_of(bool conjugate) {
  return conjugate ? CumulativeIntegral::Direction::FromInfinity : CumulativeIntegral::Direction::FromZero;
}

}  // namespace detail

inline DProfile d_profile(const PolarSpace& space, const WeightPair& w, const ExponentPair& e,
                          std::span<const double> radii, bool conjugate, const QuadratureConfig& cfg = {}) {
  if (radii.empty()) fail(ErrorKind::ConfigError, "profile grid is empty");
  for (double t : radii) {
    if (!(t > 0.0) || !std::isfinite(t)) fail(ErrorKind::ConfigError, "profile radii must be positive and finite");
  }
  detail::check_power_weights(space, w, e, conjugate);
  const auto dir = detail::direction_of(conjugate);
  const auto U = cumulative(space, w.u.fn, radii, dir, cfg);
  const auto V = cumulative(space, w.v.fn.pow(1.0 - e.p_conj), radii, dir, cfg);
  DProfile prof;
  prof.conjugate = conjugate;
  prof.radii.assign(radii.begin(), radii.end());
  std::sort(prof.radii.begin(), prof.radii.end());
  for (double t : prof.radii) {
    const double a = U(t);
    const double b = V(t);
    if (!(a > 0.0) || !(b > 0.0)) {
      fail(ErrorKind::InadmissibleWeights, "weight integral vanishes at t = " + RadialFunction::format_number(t));
    }
    prof.values.push_back(std::pow(a, 1.0 / e.q) * std::pow(b, 1.0 / e.p_conj));
  }
  classify_profile(prof);
  return prof;
}

inline DProfile d1_profile(const PolarSpace& space, const WeightPair& w, const ExponentPair& e,
                           std::span<const double> radii, const QuadratureConfig& cfg = {}) {
  return d_profile(space, w, e, radii, false, cfg);
}

inline DProfile d2_profile(const PolarSpace& space, const WeightPair& w, const ExponentPair& e,
                           std::span<const double> radii, const QuadratureConfig& cfg = {}) {
  return d_profile(space, w, e, radii, true, cfg);
}

struct HolderCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// int f g >= (int f^p)^(1/p) (int g^p')^(1/p') for p < 0.
inline HolderCheck reverse_holder_check(const RadialFunction& f, const RadialFunction& g, double p,
                                        const PolarSpace& space, const QuadratureConfig& cfg = {},
                                        double tol = 1e-10) {
  if (!(p < 0.0)) fail(ErrorKind::InvalidExponents, "reverse Hoelder needs p < 0");
  const double pc = conjugate(p);
  const double limit = space.radius_limit();
  if (!f.covers(0.0, limit)) {
    fail(ErrorKind::DivergentIntegral, "int f^p diverges: f vanishes on a set of positive measure");
  }
  const double ifp = polar_integrate(space, f.pow(p), 0.0, kInf, cfg);
  const double igp = polar_integrate(space, g.pow(pc), 0.0, kInf, cfg);
  if (!(ifp > 0.0) || !(igp > 0.0) || !std::isfinite(ifp) || !std::isfinite(igp)) {
    fail(ErrorKind::DivergentIntegral, "reverse Hoelder needs 0 < int f^p, int g^p' < inf");
  }
  HolderCheck out;
  out.rhs = std::pow(ifp, 1.0 / p) * std::pow(igp, 1.0 / pc);
  try {
    out.lhs = polar_integrate(space, f * g, 0.0, kInf, cfg);
  } catch (const Error& err) {
    if (err.kind() != ErrorKind::DivergentIntegral) throw;
    out.lhs = kInf;
  }
  out.holds = out.lhs >= out.rhs * (1.0 - tol);
  return out;
}

namespace detail {

/// Power-law exponents of the running integral of f * density.
struct RunningExponents {
  std::optional<double> at_zero;
  std::optional<double> at_infinity;
};

inline RunningExponents running_exponents(const PolarSpace& space, const RadialFunction& f, bool conjugate) {
  RunningExponents out;
  const auto d0 = space.density_exponent_at_zero();
  const auto dinf = space.density_exponent_at_infinity();
  std::optional<double> e0;
  if (f.support_begin() == 0.0 && f.exponent_at_zero()) e0 = *f.exponent_at_zero() + d0 + 1.0;
  std::optional<double> einf;
  if (f.support_end() == kInf && f.exponent_at_infinity() && dinf) einf = *f.exponent_at_infinity() + *dinf + 1.0;
  if (!conjugate) {
    // F(r) = int_0^r: grows like r^e0 at 0; like r^einf at infinity, or tends to a constant.
    if (f.support_begin() > 0.0) {
      out.at_zero.reset();  // F vanishes identically near 0
    } else {
      out.at_zero = e0;
    }
    if (f.support_end() < kInf) {
      out.at_infinity = 0.0;
    } else if (einf && std::abs(*einf) > 1e-12) {
      out.at_infinity = std::max(*einf, 0.0);
    }
    return out;
  }
  // G(r) = int_r^inf: like r^einf at infinity; like r^e0 at 0 when e0 < 0, else constant.
  if (f.support_end() < kInf) {
    out.at_infinity.reset();
  } else {
    out.at_infinity = einf;
  }
  if (f.support_begin() > 0.0) {
    out.at_zero = 0.0;
  } else if (e0 && std::abs(*e0) > 1e-12) {
    out.at_zero = std::min(*e0, 0.0);
  }
  return out;
}

inline std::optional<double> add_opt(std::optional<double> a, std::optional<double> b) {
  if (a && b) return *a + *b;
  return std::nullopt;
}

/// [int_X (inner f)^q u]^(1/q) with the inner integral over balls or their complements.
inline double hardy_lhs_impl(const PolarSpace& space, const RadialFunction& f, const RadialFunction& u, double q,
                             bool conjugate, const QuadratureConfig& cfg) {
  if (!(q < 0.0)) fail(ErrorKind::InvalidExponents, "q must be negative");
  const auto inner = std::make_shared<const CumulativeIntegral>(
      cumulative(space, f, default_inner_grid(), direction_of(conjugate), cfg));
  const auto run = running_exponents(space, f, conjugate);
  const RadialFunction weight = u * space.measure();
  const double hi = std::min(weight.support_end(), space.radius_limit());
  const double lo = weight.support_begin();

  EndpointHints hints;
  if (lo == 0.0 && run.at_zero) hints.at_zero = add_opt(*run.at_zero * q, weight.exponent_at_zero());
  if (hi == kInf && run.at_infinity) hints.at_infinity = add_opt(*run.at_infinity * q, weight.exponent_at_infinity());

  auto outer = [inner, weight, q](double r) {
    const double w = weight(r);
    if (w == 0.0) return 0.0;
    const double F = (*inner)(r);
    if (!(F > 0.0)) {
      fail(ErrorKind::DivergentIntegral, "inner integral vanishes at r = " + std::to_string(r) + " where u > 0");
    }
    return std::pow(F, q) * w;
  };
  std::vector<Singularity> sing;
  for (double b : f.breakpoints()) sing.push_back({b, 0.0});
  for (double b : weight.breakpoints()) sing.push_back({b, 0.0});
  for (double b : {f.support_begin(), f.support_end()}) {
    if (b > 0.0 && std::isfinite(b)) sing.push_back({b, 0.0});
  }
  QuadratureConfig c = cfg;
  if (hi == kInf && !space.power_law()) c.infinity_transform = InfinityTransform::Exponential;
  const double value = integrate(outer, lo, hi, c, hints, sing).value;
  if (!(value > 0.0) || !std::isfinite(value)) fail(ErrorKind::DivergentIntegral, "outer integral is not finite and positive");
  return std::pow(value, 1.0 / q);
}

}  // namespace detail

/// [int_X (int_{B(0,|x|)} f)^q u dx]^(1/q).
inline double hardy_lhs(const PolarSpace& space, const RadialFunction& f, const RadialFunction& u, double q,
                        const QuadratureConfig& cfg = {}) {
  return detail::hardy_lhs_impl(space, f, u, q, false, cfg);
}

/// [int_X (int_{X \ B(0,|x|)} f)^q u dx]^(1/q).
inline double conjugate_hardy_lhs(const PolarSpace& space, const RadialFunction& f, const RadialFunction& u, double q,
                                  const QuadratureConfig& cfg = {}) {
  return detail::hardy_lhs_impl(space, f, u, q, true, cfg);
}

/// (int_X f^p v dx)^(1/p).
inline double hardy_rhs(const PolarSpace& space, const RadialFunction& f, const RadialFunction& v, double p,
                        const QuadratureConfig& cfg = {}) {
  if (!(p < 0.0)) fail(ErrorKind::InvalidExponents, "p must be negative");
  const double lo = v.support_begin();
  const double hi = std::min(v.support_end(), space.radius_limit());
  if (!f.covers(lo, hi)) fail(ErrorKind::DivergentIntegral, "int f^p v diverges: f vanishes where v > 0");
  const double value = polar_integrate(space, f.pow(p) * v, 0.0, kInf, cfg);
  if (!(value > 0.0) || !std::isfinite(value)) fail(ErrorKind::DivergentIntegral, "int f^p v is not finite and positive");
  return std::pow(value, 1.0 / p);
}

inline double hardy_ratio(const PolarSpace& space, const RadialFunction& f, const WeightPair& w, const ExponentPair& e,
                          const QuadratureConfig& cfg = {}) {
  return hardy_lhs(space, f, w.u.fn, e.q, cfg) / hardy_rhs(space, f, w.v.fn, e.p, cfg);
}

inline double conjugate_hardy_ratio(const PolarSpace& space, const RadialFunction& f, const WeightPair& w,
                                    const ExponentPair& e, const QuadratureConfig& cfg = {}) {
  return conjugate_hardy_lhs(space, f, w.u.fn, e.q, cfg) / hardy_rhs(space, f, w.v.fn, e.p, cfg);
}

/// f = v^(1-p') on |x| <= t and A f1 beyond (mirrored for the conjugate form:
/// A f1 on |x| < t and v^(1-p') beyond).
inline RadialFunction extremal_family(const PolarSpace& space, const RadialFunction& v, const ExponentPair& e, double t,
                                      double A, const RadialFunction& f1, bool conjugate = false,
                                      const QuadratureConfig& cfg = {}) {
  if (!(A > 0.0) || !std::isfinite(A)) fail(ErrorKind::InvalidParams, "amplitude must be positive");
  if (!(t > 0.0) || !std::isfinite(t)) fail(ErrorKind::InvalidParams, "extremal radius must be positive");
  const double lo = conjugate ? 0.0 : t;
  const double hi = conjugate ? t : kInf;
  if (!f1.covers(lo, hi)) fail(ErrorKind::InadmissibleTail, "f1 must be positive where it is used");
  try {
    const double tail = polar_integrate(space, (v * f1.pow(e.p)).restricted(lo, hi), 0.0, kInf, cfg);
    if (!std::isfinite(tail)) fail(ErrorKind::InadmissibleTail, "int v f1^p is not finite");
  } catch (const Error& err) {
    if (err.kind() == ErrorKind::DivergentIntegral) {
      fail(ErrorKind::InadmissibleTail, std::string("int v f1^p diverges: ") + err.what());
    }
    throw;
  }
  const RadialFunction core = v.pow(1.0 - e.p_conj);
  const double dual = 1.0 - e.p_conj;
  std::optional<double> e0, einf;
  if (!conjugate) {
    if (v.exponent_at_zero()) e0 = *v.exponent_at_zero() * dual;
    einf = f1.exponent_at_infinity();
  } else {
    e0 = f1.exponent_at_zero();
    if (v.exponent_at_infinity()) einf = *v.exponent_at_infinity() * dual;
  }
  std::vector<double> bp{t};
  for (double b : core.breakpoints()) bp.push_back(b);
  for (double b : f1.breakpoints()) bp.push_back(b);
  auto fn = [core, f1, t, A, conjugate](double r) {
    const bool inside = r <= t;
    if (inside != conjugate) return core(r);
    return A * f1(r);
  };
  return RadialFunction(fn, e0, einf, std::move(bp), 0.0, kInf,
                        std::string(conjugate ? "extremal_conj" : "extremal") + "(t=" +
                            RadialFunction::format_number(t) + ",A=" + RadialFunction::format_number(A) + ",f1=" +
                            f1.description() + ")");
}

struct IdentityRow {
  double t = 0.0;
  double W = 0.0;         // int_0^t V
  double h = 0.0;         // W^(1/(p p'))
  double H1 = 0.0;        // int_0^t h^(-p') V
  double expected = 0.0;  // p' h^p
  double rel_error = 0.0;
  bool holds = false;
};

struct IdentityReport {
  std::vector<IdentityRow> rows;
  double max_rel_error = 0.0;
  bool holds = true;
};

/// With V = |S| density v^(1-p') and h(t) = (int_0^t V)^(1/(p p')), checks
/// int_0^t h^(-p') V = p' h(t)^p.
inline IdentityReport proof_identity_check(const PolarSpace& space, const RadialFunction& v, const ExponentPair& e,
                                           std::span<const double> t_grid, const QuadratureConfig& cfg = {},
                                           double tol = 1e-6) {
  const double pc = e.p_conj;
  const RadialFunction dual = v.pow(1.0 - pc);
  const RadialFunction V = dual * space.measure();
  const auto W = std::make_shared<const CumulativeIntegral>(
      cumulative(space, dual, t_grid, CumulativeIntegral::Direction::FromZero, cfg));
  EndpointHints hints;
  if (V.exponent_at_zero()) {
    const double ev = *V.exponent_at_zero();
    hints.at_zero = (ev + 1.0) * (-1.0 / e.p) + ev;
  }
  std::vector<Singularity> sing;
  for (double b : V.breakpoints()) sing.push_back({b, 0.0});
  auto integrand = [W, V, p = e.p](double s) {
    const double w = (*W)(s);
    if (w <= 0.0) return 0.0;
    return std::pow(w, -1.0 / p) * V(s);
  };
  IdentityReport rep;
  for (double t : t_grid) {
    IdentityRow row;
    row.t = t;
    row.W = (*W)(t);
    if (!(row.W > 0.0) || !std::isfinite(row.W)) fail(ErrorKind::DivergentIntegral, "int_0^t V is not finite and positive");
    row.h = std::pow(row.W, 1.0 / (e.p * pc));
    row.H1 = integrate(integrand, 0.0, t, cfg.tightened(0.01), hints, sing).value;
    row.expected = pc * std::pow(row.h, e.p);
    row.rel_error = std::abs(row.H1 - row.expected) / std::abs(row.expected);
    row.holds = row.rel_error <= tol;
    rep.max_rel_error = std::max(rep.max_rel_error, row.rel_error);
    rep.holds = rep.holds && row.holds;
    rep.rows.push_back(row);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Test-function families

struct ExponentWindow {
  double lo = 0.0;
  double hi = 0.0;
  bool lo_unbounded = false;  // the true window extends to -inf; lo is a cap
  bool hi_unbounded = false;  // the true window extends to +inf; hi is a cap

  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double s) const { return (lo_unbounded || s > lo) && (hi_unbounded || s < hi); }
};

/// Exponents (s0, s_inf) for which a piecewise power f makes both sides of the
/// power-weight inequality finite and positive.
struct AdmissibleWindow {
  ExponentWindow s0;
  ExponentWindow s_inf;
};

inline constexpr double kWindowCap = 3.0;

inline AdmissibleWindow admissible_window(double Q, double alpha, double beta, const ExponentPair& e, bool conjugate) {
  const double a = -(alpha + Q) / e.q - Q;  // q (s + Q) + alpha + Q changes sign here
  const double b = -(beta + Q) / e.p;       // p s + beta + Q changes sign here
  AdmissibleWindow w;
  if (!conjugate) {
    w.s0 = {-Q, std::min(a, b), false, false};
    const double lo = std::max({-Q, a, b});
    w.s_inf = {lo, lo + kWindowCap, false, true};
  } else {
    const double hi = std::min({-Q, a, b});
    w.s0 = {hi - kWindowCap, hi, true, false};
    w.s_inf = {std::max(a, b), -Q, false, false};
  }
  if (!(w.s0.width() > 0.0) || !(w.s_inf.width() > 0.0)) {
    fail(ErrorKind::InadmissibleWeights, "no piecewise power test function makes both sides finite");
  }
  return w;
}

/// Names of the exponent inequalities a piecewise power violates.
inline std::vector<std::string> admissibility_violations(const PiecewisePowerFunction& f, double Q, double alpha,
                                                         double beta, const ExponentPair& e, bool conjugate) {
  std::vector<std::string> out;
  auto need = [&](bool ok, const char* what) {
    if (!ok) out.emplace_back(what);
  };
  const double s0 = f.s0;
  const double si = f.s_inf;
  if (!conjugate) {
    need(s0 + Q > 0.0, "s0 + Q > 0");
    need(si + Q > 0.0, "s_inf + Q > 0");
  } else {
    need(s0 + Q < 0.0, "s0 + Q < 0");
    need(si + Q < 0.0, "s_inf + Q < 0");
  }
  need(e.q * (s0 + Q) + alpha + Q > 0.0, "q(s0 + Q) + alpha + Q > 0");
  need(e.q * (si + Q) + alpha + Q < 0.0, "q(s_inf + Q) + alpha + Q < 0");
  need(e.p * s0 + beta + Q > 0.0, "p s0 + beta + Q > 0");
  need(e.p * si + beta + Q < 0.0, "p s_inf + beta + Q < 0");
  return out;
}

struct FamilySpec {
  std::size_t count = 50;
  std::uint64_t seed = 7;
  double margin = 0.05;  // fraction of each window kept clear of its ends
  double r_lo = 0.1;
  double r_hi = 10.0;
};

/// Seeded members with (s0, s_inf) uniform in the window and R log-uniform.
inline std::vector<PiecewisePowerFunction> sample_family(const AdmissibleWindow& w, const FamilySpec& spec) {
  if (!(spec.r_lo > 0.0) || !(spec.r_hi >= spec.r_lo)) fail(ErrorKind::ConfigError, "family radius range is invalid");
  if (!(spec.margin >= 0.0 && spec.margin < 0.5)) fail(ErrorKind::ConfigError, "family margin must lie in [0, 0.5)");
  CounterRng rng(spec.seed, 0x66616d696c79ULL);
  auto draw = [&](const ExponentWindow& win) {
    const double m = spec.margin * win.width();
    return rng.uniform(win.lo + m, win.hi - m);
  };
  std::vector<PiecewisePowerFunction> out;
  out.reserve(spec.count);
  for (std::size_t i = 0; i < spec.count; ++i) {
    const double s0 = draw(w.s0);
    const double si = draw(w.s_inf);
    const double R = std::exp(rng.uniform(std::log(spec.r_lo), std::log(spec.r_hi)));
    out.emplace_back(s0, si, R);
  }
  return out;
}

/// Exponent of the default f1 = r^s in the extremal family.
inline double default_extremal_exponent(const AdmissibleWindow& w, bool conjugate) {
  if (!conjugate) return w.s_inf.hi_unbounded ? w.s_inf.lo + 1.0 : w.s_inf.mid();
  return w.s0.lo_unbounded ? w.s0.hi - 1.0 : w.s0.mid();
}

// ---------------------------------------------------------------------------
// Verification

struct FamilyMember {
  std::string descriptor;
  RadialFunction f;
  std::optional<PiecewisePowerFunction> piecewise;
};

inline std::vector<FamilyMember> as_family(std::span<const PiecewisePowerFunction> fs) {
  std::vector<FamilyMember> out;
  for (const auto& f : fs) out.push_back({f.describe(), f.radial(), f});
  return out;
}

struct HardyOptions {
  QuadratureConfig quad;
  std::vector<double> radii = default_profile_grid();
  std::vector<double> amplitudes = {1e2, 1e3, 1e4};
  std::optional<double> extremal_t;
  std::optional<RadialFunction> extremal_f1;
  double ratio_tol = 1e-6;
  double family_tol = 1e-2;
  unsigned threads = 0;
};

struct RatioEntry {
  std::string descriptor;
  double value = std::numeric_limits<double>::quiet_NaN();
  std::string error;  // empty when the ratio was computed
};

struct ExtremalEntry {
  double amplitude = 0.0;
  double t = 0.0;
  double value = std::numeric_limits<double>::quiet_NaN();
  std::string error;
};

struct HardyReport {
  bool conjugate = false;
  ExponentPair exps;
  std::string u;
  std::string v;
  DProfile profile;
  double D = 0.0;
  double c_lower = 0.0;
  double c_upper = 0.0;
  double factor = 0.0;
  std::vector<RatioEntry> ratios;
  std::vector<ExtremalEntry> extremal;
  double min_ratio = kInf;
  double min_extremal = kInf;
  double margin = 0.0;
  Verdict verdict = Verdict::Inconclusive;
  std::vector<std::string> diagnostics;
  std::vector<std::string> warnings;
};

/// Radius for the extremal family: the argmin of the profile, or the grid
/// point nearest 1 when the profile is constant.
inline double extremal_radius(const DProfile& prof) {
  if (!prof.constant) return prof.radii[prof.argmin];
  double best = prof.radii.front();
  for (double t : prof.radii) {
    if (std::abs(std::log(t)) < std::abs(std::log(best))) best = t;
  }
  return best;
}

inline HardyReport verify_hardy(const PolarSpace& space, const WeightPair& w, const ExponentPair& e,
                                std::span<const FamilyMember> family, const HardyOptions& opt = {},
                                bool conjugate = false) {
  HardyReport rep;
  rep.conjugate = conjugate;
  rep.exps = e;
  rep.u = w.u.describe();
  rep.v = w.v.describe();
  rep.profile = d_profile(space, w, e, opt.radii, conjugate, opt.quad);
  for (const auto& msg : rep.profile.warnings) rep.warnings.push_back(msg);
  rep.D = rep.profile.infimum;
  const auto cb = constant_bounds(e, rep.D);
  rep.c_lower = cb.c_lower;
  rep.c_upper = cb.c_upper;
  rep.factor = cb.factor;

  const Monotonicity expected = conjugate ? Monotonicity::NonIncreasing : Monotonicity::NonDecreasing;
  const bool monotone_ok = rep.profile.monotone == expected;
  if (!monotone_ok) {
    rep.diagnostics.push_back(std::string("monotonicity: profile is ") + std::string(to_string(rep.profile.monotone)) +
                              ", expected " + std::string(to_string(expected)));
  }

  auto ratio_of = [&](const RadialFunction& f) {
    return conjugate ? conjugate_hardy_ratio(space, f, w, e, opt.quad) : hardy_ratio(space, f, w, e, opt.quad);
  };

  rep.ratios = parallel_map(
      family.size(),
      [&](std::size_t i) {
        RatioEntry entry;
        entry.descriptor = family[i].descriptor;
        try {
          entry.value = ratio_of(family[i].f);
        } catch (const Error& err) {
          entry.error = err.what();
        }
        return entry;
      },
      opt.threads);

  // Extremal family.
  std::optional<RadialFunction> f1 = opt.extremal_f1;
  if (!f1 && w.u.power && w.v.power && space.power_law()) {
    try {
      const auto win = admissible_window(space.homogeneous_dim(), *w.u.power, *w.v.power, e, conjugate);
      f1 = RadialFunction::power(default_extremal_exponent(win, conjugate));
    } catch (const Error& err) {
      rep.diagnostics.push_back(std::string("extremal family: ") + err.what());
    }
  }
  if (f1 && !opt.amplitudes.empty()) {
    const double t = opt.extremal_t.value_or(extremal_radius(rep.profile));
    rep.warnings.emplace_back(kExtremalDirectionWarning);
    rep.extremal = parallel_map(
        opt.amplitudes.size(),
        [&](std::size_t i) {
          ExtremalEntry entry;
          entry.amplitude = opt.amplitudes[i];
          entry.t = t;
          try {
            entry.value = ratio_of(extremal_family(space, w.v.fn, e, t, entry.amplitude, *f1, conjugate, opt.quad));
          } catch (const Error& err) {
            entry.error = err.what();
          }
          return entry;
        },
        opt.threads);
  } else if (!f1) {
    rep.diagnostics.emplace_back("extremal family: no f1 available for these weights; upper bound not probed");
  }

  bool any_error = false;
  bool violated = false;
  const double threshold = rep.c_lower * (1.0 - opt.ratio_tol);
  for (const auto& r : rep.ratios) {
    if (!r.error.empty()) {
      any_error = true;
      rep.diagnostics.push_back("family member " + r.descriptor + " skipped: " + r.error);
      continue;
    }
    rep.min_ratio = std::min(rep.min_ratio, r.value);
    if (r.value < threshold) violated = true;
  }
  for (const auto& x : rep.extremal) {
    if (!x.error.empty()) {
      any_error = true;
      rep.diagnostics.push_back("extremal member A = " + RadialFunction::format_number(x.amplitude) + " failed: " + x.error);
      continue;
    }
    rep.min_extremal = std::min(rep.min_extremal, x.value);
    if (x.value < threshold) violated = true;
  }
  const double overall_min = std::min(rep.min_ratio, rep.min_extremal);
  rep.margin = overall_min - rep.c_lower;
  const bool upper_ok = rep.min_extremal <= rep.c_upper * (1.0 + opt.family_tol);
  if (!rep.extremal.empty() && !upper_ok) {
    rep.diagnostics.push_back("extremal family minimum " + RadialFunction::format_number(rep.min_extremal) +
                              " exceeds c_upper (1 + tol)");
  }

  if (!monotone_ok) {
    rep.verdict = Verdict::Inconclusive;
  } else if (violated) {
    rep.verdict = Verdict::Violated;
  } else if (upper_ok && !any_error && !rep.extremal.empty()) {
    rep.verdict = Verdict::Verified;
  } else {
    rep.verdict = Verdict::Inconclusive;
  }
  return rep;
}

inline HardyReport verify_conjugate_hardy(const PolarSpace& space, const WeightPair& w, const ExponentPair& e,
                                          std::span<const FamilyMember> family, const HardyOptions& opt = {}) {
  return verify_hardy(space, w, e, family, opt, true);
}

}  // namespace revhardy
