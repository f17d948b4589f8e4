#pragma once

#include <cmath>
#include <string>
#include <utility>

#include "revhardy/errors.hpp"

namespace revhardy {

/// Exponents q <= p < 0 with their conjugates p' = p / (p - 1), q' = q / (q - 1).
struct ExponentPair {
  double p = -1.0;
  double q = -1.0;
  double p_conj = 0.5;
  double q_conj = 0.5;
};

inline double conjugate(double p) { return p / (p - 1.0); }

inline ExponentPair make_exponents(double p, double q) {
  if (!std::isfinite(p) || !std::isfinite(q) || !(p < 0.0) || !(q <= p)) {
    fail(ErrorKind::InvalidExponents,
         "exponents must satisfy q <= p < 0 (got p = " + std::to_string(p) + ", q = " + std::to_string(q) + ")");
  }
  return {p, q, conjugate(p), conjugate(q)};
}

/// |p|^(1/q) (p')^(1/p'), never above 1.
inline double bound_factor(const ExponentPair& e) {
  return std::pow(std::abs(e.p), 1.0 / e.q) * std::pow(e.p_conj, 1.0 / e.p_conj);
}

struct ConstantBounds {
  double c_lower = 0.0;
  double c_upper = 0.0;
  double factor = 0.0;
};

inline ConstantBounds constant_bounds(const ExponentPair& e, double D) {
  if (!(D >= 0.0)) fail(ErrorKind::InvalidParams, "D must be non-negative");
  const double f = bound_factor(e);
  return {f * D, D, f};
}

}  // namespace revhardy
