#pragma once

// Radial functions g(|x|) carrying the metadata the integrators need:
// power-law exponents at 0 and at infinity, interior breakpoints, and the
// radial support. Products and powers propagate the metadata so that every
// integrand assembled from weights and test functions arrives at the
// quadrature with its endpoint behaviour declared.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "revhardy/errors.hpp"
#include "revhardy/quadrature.hpp"

namespace revhardy {

class RadialFunction {
 public:
  using Fn = std::function<double(double)>;

  RadialFunction() : RadialFunction(constant(0.0)) {}

  RadialFunction(Fn fn, std::optional<double> exponent_at_zero, std::optional<double> exponent_at_infinity,
                 std::vector<double> breakpoints = {}, double support_begin = 0.0, double support_end = kInf,
                 std::string description = "callable")
      : fn_(std::make_shared<Fn>(std::move(fn))),
        exp0_(exponent_at_zero),
        exp_inf_(exponent_at_infinity),
        breakpoints_(std::move(breakpoints)),
        support_begin_(support_begin),
        support_end_(support_end),
        description_(std::move(description)) {
    std::sort(breakpoints_.begin(), breakpoints_.end());
    breakpoints_.erase(std::unique(breakpoints_.begin(), breakpoints_.end()), breakpoints_.end());
  }

  /// c * r^gamma on (0, inf).
  static RadialFunction power(double gamma, double scale = 1.0) {
    return RadialFunction([gamma, scale](double r) { return scale * std::pow(r, gamma); }, gamma, gamma, {}, 0.0,
                          kInf, "|x|^" + format_number(gamma));
  }

  static RadialFunction constant(double c) {
    return RadialFunction([c](double) { return c; }, 0.0, 0.0, {}, 0.0, kInf, format_number(c));
  }

  /// Indicator of lo < r < hi.
  static RadialFunction indicator(double lo, double hi) {
    return RadialFunction([](double) { return 1.0; }, 0.0, 0.0, {}, lo, hi,
                          "1_(" + format_number(lo) + "," + format_number(hi) + ")");
  }

  double operator()(double r) const {
    if (r < support_begin_ || r > support_end_) return 0.0;
    return (*fn_)(r);
  }

  std::optional<double> exponent_at_zero() const { return support_begin_ > 0.0 ? std::optional<double>{} : exp0_; }
  std::optional<double> exponent_at_infinity() const {
    return support_end_ < kInf ? std::optional<double>{} : exp_inf_;
  }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  double support_begin() const { return support_begin_; }
  double support_end() const { return support_end_; }
  bool full_support() const { return support_begin_ == 0.0 && support_end_ == kInf; }
  const std::string& description() const { return description_; }

  /// Pointwise product; exponents add, supports intersect.
  friend RadialFunction operator*(const RadialFunction& a, const RadialFunction& b) {
    auto fa = a.fn_;
    auto fb = b.fn_;
    std::vector<double> bp = a.breakpoints_;
    bp.insert(bp.end(), b.breakpoints_.begin(), b.breakpoints_.end());
    const double lo = std::max(a.support_begin_, b.support_begin_);
    const double hi = std::min(a.support_end_, b.support_end_);
    for (double edge : {a.support_begin_, a.support_end_, b.support_begin_, b.support_end_}) {
      if (edge > lo && edge < hi) bp.push_back(edge);
    }
    return RadialFunction([fa, fb](double r) { return (*fa)(r) * (*fb)(r); }, add(a.exp0_, b.exp0_),
                          add(a.exp_inf_, b.exp_inf_), std::move(bp), lo, hi,
                          "(" + a.description_ + ")*(" + b.description_ + ")");
  }

  /// Pointwise power g^e on the support. Outside the support the result is
  /// zero for e > 0; for e < 0 callers must treat the complement as +inf
  /// (see covers()).
  RadialFunction pow(double e) const {
    auto f = fn_;
    return RadialFunction([f, e](double r) { return std::pow((*f)(r), e); }, scale(exp0_, e), scale(exp_inf_, e),
                          breakpoints_, support_begin_, support_end_, "(" + description_ + ")^" + format_number(e));
  }

  RadialFunction scaled(double c) const {
    auto f = fn_;
    return RadialFunction([f, c](double r) { return c * (*f)(r); }, exp0_, exp_inf_, breakpoints_, support_begin_,
                          support_end_, format_number(c) + "*(" + description_ + ")");
  }

  /// Restriction to lo < r < hi.
  RadialFunction restricted(double lo, double hi) const {
    RadialFunction out = *this;
    out.support_begin_ = std::max(support_begin_, lo);
    out.support_end_ = std::min(support_end_, hi);
    return out;
  }

  /// True when the support contains (lo, hi).
  bool covers(double lo, double hi) const { return support_begin_ <= lo && support_end_ >= hi; }

  static std::string format_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
  }

 private:
  static std::optional<double> add(std::optional<double> a, std::optional<double> b) {
    if (a && b) return *a + *b;
    return std::nullopt;
  }
  static std::optional<double> scale(std::optional<double> a, double e) {
    if (a) return *a * e;
    return std::nullopt;
  }

  std::shared_ptr<const Fn> fn_;
  std::optional<double> exp0_;
  std::optional<double> exp_inf_;
  std::vector<double> breakpoints_;
  double support_begin_ = 0.0;
  double support_end_ = kInf;
  std::string description_;
};

/// Strictly positive radial test function: scale * r^s0 for r <= R and
/// scale * R^(s0 - s_inf) r^s_inf for r > R (continuous at R).
struct PiecewisePowerFunction {
  double s0 = 0.0;
  double s_inf = 0.0;
  double R = 1.0;
  double scale = 1.0;

  PiecewisePowerFunction() = default;
  PiecewisePowerFunction(double s0_, double s_inf_, double R_, double scale_ = 1.0)
      : s0(s0_), s_inf(s_inf_), R(R_), scale(scale_) {
    if (!(R > 0.0) || !(scale > 0.0) || !std::isfinite(s0) || !std::isfinite(s_inf) || !std::isfinite(R)) {
      fail(ErrorKind::InvalidParams, "piecewise power function needs finite exponents, R > 0 and scale > 0");
    }
  }

  double operator()(double r) const {
    if (r <= R) return scale * std::pow(r, s0);
    return scale * std::pow(R, s0 - s_inf) * std::pow(r, s_inf);
  }

  PiecewisePowerFunction scaled(double c) const { return {s0, s_inf, R, scale * c}; }

  /// Multiplication by |x|^gamma keeps the family closed.
  PiecewisePowerFunction times_power(double gamma) const { return {s0 + gamma, s_inf + gamma, R, scale}; }

  RadialFunction radial() const {
    const PiecewisePowerFunction self = *this;
    return RadialFunction([self](double r) { return self(r); }, s0, s_inf, {R}, 0.0, kInf, describe());
  }

  std::string describe() const {
    return "pp(s0=" + RadialFunction::format_number(s0) + ",s_inf=" + RadialFunction::format_number(s_inf) +
           ",R=" + RadialFunction::format_number(R) + ",scale=" + RadialFunction::format_number(scale) + ")";
  }
};

}  // namespace revhardy
