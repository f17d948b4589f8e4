#pragma once

// Closed forms for power weights |x|^gamma on a group of homogeneous
// dimension Q with sphere area |S|.

#include <cmath>
#include <string>

#include "revhardy/errors.hpp"
#include "revhardy/exponents.hpp"

namespace revhardy {

inline constexpr double kBoundaryExponentTol = 1e-10;
inline constexpr double kBalanceTol = 1e-12;

struct PowerParams {
  double Q = 1.0;
  double sphere_area = 2.0;
  double alpha = 0.0;
  double beta = 0.0;
  ExponentPair exps;

  /// Exponent of v^(1-p') = |x|^(beta (1 - p')).
  double v_dual_exponent() const { return beta * (1.0 - exps.p_conj); }
};

/// int_{B(0,r)} |x|^gamma dx = |S| r^(Q+gamma) / (Q+gamma).
inline double ball_power_integral(double Q, double sphere_area, double gamma, double r) {
  const double s = Q + gamma;
  if (!(s > kBoundaryExponentTol)) {
    fail(ErrorKind::InadmissibleExponent, "ball integral of |x|^" + std::to_string(gamma) + " needs Q + gamma > 0");
  }
  if (!(r > 0.0)) fail(ErrorKind::InvalidParams, "radius must be positive");
  return sphere_area / s * std::pow(r, s);
}

/// int_{|x| > r} |x|^gamma dx = |S| r^(Q+gamma) / |Q+gamma|.
inline double complement_power_integral(double Q, double sphere_area, double gamma, double r) {
  const double s = Q + gamma;
  if (!(s < -kBoundaryExponentTol)) {
    fail(ErrorKind::InadmissibleExponent,
         "complement integral of |x|^" + std::to_string(gamma) + " needs Q + gamma < 0");
  }
  if (!(r > 0.0)) fail(ErrorKind::InvalidParams, "radius must be positive");
  return sphere_area / -s * std::pow(r, s);
}

struct BalanceCheck {
  bool holds = false;
  double residual = 0.0;
};

/// (Q+alpha)/q + (Q+beta(1-p'))/p'. The same condition governs both the
/// direct and the conjugate case.
inline BalanceCheck balance_check_direct(const PowerParams& pp) {
  const double r = (pp.Q + pp.alpha) / pp.exps.q + (pp.Q + pp.v_dual_exponent()) / pp.exps.p_conj;
  return {std::abs(r) <= kBalanceTol, r};
}

/// beta making the balance residual vanish.
inline double solve_beta(double alpha, double Q, const ExponentPair& e) {
  const double pc = e.p_conj;
  return (-pc * (Q + alpha) / e.q - Q) / (1.0 - pc);
}

struct HardyConstant {
  double D = 0.0;
  double c_lower = 0.0;
  double c_upper = 0.0;
  double factor = 0.0;
};

inline HardyConstant hardy_constant_direct(const PowerParams& pp) {
  const double a = pp.Q + pp.alpha;
  const double b = pp.Q + pp.v_dual_exponent();
  if (!(a > kBoundaryExponentTol)) fail(ErrorKind::InadmissibleExponent, "direct case needs alpha + Q > 0");
  if (!(b > kBoundaryExponentTol)) fail(ErrorKind::InadmissibleExponent, "direct case needs Q + beta(1-p') > 0");
  const auto bal = balance_check_direct(pp);
  if (!bal.holds) fail(ErrorKind::BalanceViolated, "balance residual " + std::to_string(bal.residual));
  const double D = std::pow(pp.sphere_area / a, 1.0 / pp.exps.q) * std::pow(pp.sphere_area / b, 1.0 / pp.exps.p_conj);
  const auto cb = constant_bounds(pp.exps, D);
  return {D, cb.c_lower, cb.c_upper, cb.factor};
}

inline HardyConstant hardy_constant_conjugate(const PowerParams& pp) {
  const double a = pp.Q + pp.alpha;
  const double b = pp.Q + pp.v_dual_exponent();
  if (!(a < -kBoundaryExponentTol)) fail(ErrorKind::InadmissibleExponent, "conjugate case needs alpha + Q < 0");
  if (!(b < -kBoundaryExponentTol)) fail(ErrorKind::InadmissibleExponent, "conjugate case needs Q + beta(1-p') < 0");
  const auto bal = balance_check_direct(pp);
  if (!bal.holds) fail(ErrorKind::BalanceViolated, "balance residual " + std::to_string(bal.residual));
  const double D =
      std::pow(pp.sphere_area / -a, 1.0 / pp.exps.q) * std::pow(pp.sphere_area / -b, 1.0 / pp.exps.p_conj);
  const auto cb = constant_bounds(pp.exps, D);
  return {D, cb.c_lower, cb.c_upper, cb.factor};
}

}  // namespace revhardy
