#pragma once

// Adaptive integration on sub-intervals of [0, inf] for integrands with
// power-law behaviour at the endpoints and at interior points.
//
// Every interval is split at declared breakpoints. A piece whose endpoint
// carries a singular power law |r - c|^e (e < 1, non-integer) is graded by
// r = c + L u^k with k = 2 / (e + 1), which turns the endpoint behaviour into
// u^1. A semi-infinite piece is compactified by r = c + s t / (1 - t)
// (algebraic) or r = c - s ln(1 - t) (exponential). A declared tail
// exponent grades the algebraic map as well, r = c + s (u^-k - 1).
// All pieces then feed one global adaptive bisection driven by a 21-point
// Gauss-Kronrod rule.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "revhardy/errors.hpp"

namespace revhardy {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Semi-infinite pieces are integrated numerically at most up to this radius;
// beyond the cut a declared tail exponent supplies the remaining mass in
// closed form.
inline constexpr double kTailCut = 1e150;

enum class InfinityTransform { Algebraic, Exponential };

struct QuadratureConfig {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  int max_subdivisions = 2000;
  InfinityTransform infinity_transform = InfinityTransform::Algebraic;

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) fail(ErrorKind::ConfigError, "quadrature tolerances must be positive");
    if (max_subdivisions < 1) fail(ErrorKind::ConfigError, "max_subdivisions must be at least 1");
  }

  QuadratureConfig tightened(double factor) const {
    QuadratureConfig c = *this;
    c.rel_tol *= factor;
    c.abs_tol *= factor;
    return c;
  }
};

/// Integrand behaves like |r - at|^exponent near `at`.
struct Singularity {
  double at = 0.0;
  double exponent = 0.0;
};

struct EndpointHints {
  std::optional<double> at_zero;      // g(r) ~ r^e as r -> 0+
  std::optional<double> at_infinity;  // g(r) ~ r^e as r -> inf
};

struct IntegralResult {
  double value = 0.0;
  double error = 0.0;
  int subdivisions = 0;
};

namespace detail {

struct Kronrod21 {
  std::array<double, 11> x{};
  std::array<double, 11> wk{};
  std::array<double, 11> wg{};  // Gauss-10 weights on the odd Kronrod nodes

  Kronrod21() {
    using boost::math::quadrature::gauss;
    using boost::math::quadrature::gauss_kronrod;
    const auto& a = gauss_kronrod<double, 21>::abscissa();
    const auto& w = gauss_kronrod<double, 21>::weights();
    const auto& g = gauss<double, 10>::weights();
    for (std::size_t i = 0; i < 11; ++i) {
      x[i] = a[i];
      wk[i] = w[i];
      wg[i] = (i % 2 == 1) ? g[i / 2] : 0.0;
    }
  }
};

inline const Kronrod21& kronrod21() {
  static const Kronrod21 rule;
  return rule;
}

/// Grading power for an endpoint exponent; 1 means no grading needed.
inline double grading_power(double e) {
  if (e >= 1.0) return 1.0;
  if (std::abs(e - std::round(e)) < 1e-12 && e >= 0.0) return 1.0;
  return std::clamp(2.0 / (e + 1.0), 1.0, 100.0);
}

/// One mapped piece: u in [0, 1] -> r.
struct Piece {
  enum class Kind { Finite, Algebraic, Exponential } kind = Kind::Finite;
  double origin = 0.0;  // graded endpoint (finite) or lower limit (infinite)
  double length = 0.0;  // interval length (finite) or scale (infinite)
  double sign = 1.0;    // +1: r grows away from origin, -1: r decreases
  double k = 1.0;       // grading power in u
  double limit = 0.0;   // the far endpoint, used to keep r inside the piece
  double u_min = 0.0;   // lower end of the u range actually integrated

  // Returns {r, dr/du}. A zero Jacobian marks a node whose contribution
  // underflows and must not be evaluated.
  std::pair<double, double> map(double u) const {
    switch (kind) {
      case Kind::Finite: {
        const double uk = std::pow(u, k);
        double r = origin + sign * length * uk;
        const double jac = length * k * std::pow(u, k - 1.0);
        if (r == origin) r = std::nextafter(origin, limit);
        return {r, jac};
      }
      case Kind::Algebraic: {
        // r = origin + length (u^-k - 1); k = 1 is the map t / (1 - t), t = 1 - u.
        const double inv = std::pow(u, -k);
        const double r = origin + length * (inv - 1.0);
        const double jac = length * k * inv / u;
        if (!std::isfinite(r) || !std::isfinite(jac)) return {kInf, 0.0};
        return {r == origin ? std::nextafter(origin, kInf) : r, jac};
      }
      case Kind::Exponential: {
        // t = 1 - u, r = origin - length ln(1 - t) = origin - length ln(u)
        const double r = origin - length * std::log(u);
        const double jac = length / u;
        if (!std::isfinite(r) || !std::isfinite(jac)) return {kInf, 0.0};
        return {r == origin ? std::nextafter(origin, kInf) : r, jac};
      }
    }
    return {origin, 0.0};
  }
};

struct Segment {
  std::size_t piece = 0;
  double a = 0.0;
  double b = 1.0;
  double value = 0.0;
  double error = 0.0;
  int depth = 0;

  bool operator<(const Segment& other) const { return error < other.error; }
};

template <class F>
Segment kronrod_segment(const F& g, const Piece& piece, std::size_t piece_index, double a, double b, int depth) {
  const auto& rule = kronrod21();
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double k_sum = 0.0;
  double g_sum = 0.0;
  auto eval = [&](double u) -> double {
    const auto [r, jac] = piece.map(u);
    if (jac == 0.0 || !std::isfinite(r)) return 0.0;
    const double v = g(r);
    if (v == 0.0) return 0.0;
    const double out = v * jac;
    if (!std::isfinite(out)) {
      fail(ErrorKind::NonConvergent, "integrand is not finite at r = " + std::to_string(r));
    }
    return out;
  };
  for (std::size_t i = 0; i < rule.x.size(); ++i) {
    if (rule.x[i] == 0.0) {
      const double f0 = eval(mid);
      k_sum += rule.wk[i] * f0;
      g_sum += rule.wg[i] * f0;
      continue;
    }
    const double dx = half * rule.x[i];
    const double fsum = eval(mid - dx) + eval(mid + dx);
    k_sum += rule.wk[i] * fsum;
    g_sum += rule.wg[i] * fsum;
  }
  Segment s;
  s.piece = piece_index;
  s.a = a;
  s.b = b;
  s.value = k_sum * half;
  s.error = std::abs((k_sum - g_sum) * half);
  s.depth = depth;
  return s;
}

inline std::optional<double> exponent_at(double point, std::span<const Singularity> sing) {
  for (const auto& s : sing) {
    if (s.at == point || std::abs(s.at - point) <= 1e-14 * std::max(1.0, std::abs(point))) return s.exponent;
  }
  return std::nullopt;
}

}  // namespace detail

/// Integral of g over [a, b], with b possibly +inf. Throws DivergentIntegral
/// when a declared exponent proves the integral infinite, NonConvergent when
/// the subdivision budget runs out.
template <class F>
IntegralResult integrate(const F& g, double a, double b, const QuadratureConfig& cfg = {},
                         const EndpointHints& hints = {}, std::span<const Singularity> singular_points = {}) {
  using detail::Piece;
  cfg.validate();
  if (std::isnan(a) || std::isnan(b) || a < 0.0) fail(ErrorKind::NonConvergent, "invalid integration limits");
  if (b <= a) return {};

  // Analytic divergence certificates.
  if (a == 0.0 && hints.at_zero && *hints.at_zero <= -1.0) {
    fail(ErrorKind::DivergentIntegral, "integrand ~ r^" + std::to_string(*hints.at_zero) + " is not integrable at 0");
  }
  if (b == kInf && hints.at_infinity && *hints.at_infinity >= -1.0) {
    fail(ErrorKind::DivergentIntegral,
         "integrand ~ r^" + std::to_string(*hints.at_infinity) + " is not integrable at infinity");
  }
  for (const auto& s : singular_points) {
    if (s.at >= a && s.at <= b && s.exponent <= -1.0 && !(s.at == 0.0 && a == 0.0 && hints.at_zero)) {
      fail(ErrorKind::DivergentIntegral, "non-integrable singularity at r = " + std::to_string(s.at));
    }
  }

  // Collect breakpoints.
  std::vector<double> points{a};
  for (const auto& s : singular_points) {
    if (s.at > a && s.at < b) points.push_back(s.at);
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());

  auto exponent_left = [&](double point) -> double {
    if (point == 0.0 && hints.at_zero) return *hints.at_zero;
    return detail::exponent_at(point, singular_points).value_or(0.0);
  };

  std::vector<Piece> pieces;
  double tail_correction = 0.0;
  auto add_finite = [&](double lo, double hi) {
    const double e_lo = exponent_left(lo);
    const double e_hi = (hi == 0.0) ? 0.0 : detail::exponent_at(hi, singular_points).value_or(0.0);
    const double k_lo = detail::grading_power(e_lo);
    const double k_hi = detail::grading_power(e_hi);
    if (k_lo == 1.0 && k_hi == 1.0) {
      pieces.push_back({Piece::Kind::Finite, lo, hi - lo, 1.0, 1.0, hi});
      return;
    }
    if (k_hi == 1.0) {
      pieces.push_back({Piece::Kind::Finite, lo, hi - lo, 1.0, k_lo, hi});
      return;
    }
    if (k_lo == 1.0) {
      pieces.push_back({Piece::Kind::Finite, hi, hi - lo, -1.0, k_hi, lo});
      return;
    }
    const double mid = 0.5 * (lo + hi);
    pieces.push_back({Piece::Kind::Finite, lo, mid - lo, 1.0, k_lo, mid});
    pieces.push_back({Piece::Kind::Finite, hi, hi - mid, -1.0, k_hi, mid});
  };
  // Linear bisection cannot resolve a power law spread over many decades, so
  // long intervals away from 0 are cut geometrically first.
  auto add_range = [&](double lo, double hi) {
    constexpr double kMaxRatio = 1e3;
    if (lo > 0.0 && hi / lo > kMaxRatio) {
      const int n = static_cast<int>(std::ceil(std::log(hi / lo) / std::log(kMaxRatio)));
      double prev = lo;
      for (int i = 1; i < n; ++i) {
        const double next = lo * std::pow(hi / lo, static_cast<double>(i) / n);
        add_finite(prev, next);
        prev = next;
      }
      add_finite(prev, hi);
      return;
    }
    add_finite(lo, hi);
  };

  if (b == kInf) {
    // The semi-infinite piece must start at a regular point.
    double start = points.back();
    const bool start_singular = (start == 0.0) || detail::exponent_at(start, singular_points).has_value();
    if (start_singular) {
      const double next = start + std::max(1.0, std::abs(start));
      points.push_back(next);
      start = next;
    }
    for (std::size_t i = 0; i + 1 < points.size(); ++i) add_range(points[i], points[i + 1]);
    const double scale = std::max(1.0, start);
    if (cfg.infinity_transform == InfinityTransform::Algebraic) {
      double k = 1.0;
      double cut = kTailCut;
      if (hints.at_infinity) {
        const double decay = -*hints.at_infinity - 1.0;
        k = std::clamp(2.0 / decay, 1.0, 100.0);
        // Beyond start * 10^(20 / decay) a pure power tail holds under 1e-20 of
        // the mass near start; cutting there also keeps nested integrands in range.
        cut = std::min(kTailCut, std::max(start, scale) * std::pow(10.0, std::min(150.0, 20.0 / decay)));
        // Nested integrands can leave double range before the cut, and products of
        // powers can underflow to 0; the analytic correction covers whatever lies
        // beyond a smaller cut.
        auto usable = [&](double r) {
          try {
            const double v = g(r);
            return std::isfinite(v) && v != 0.0;
          } catch (const Error&) {
            return false;
          }
        };
        while (cut > 1e3 * scale && !usable(cut)) cut = std::sqrt(cut * scale);
      }
      Piece tail{Piece::Kind::Algebraic, start, scale, 1.0, k, kInf};
      tail.u_min = std::pow(1.0 + (cut - start) / scale, -1.0 / k);
      pieces.push_back(tail);
      if (hints.at_infinity) {
        // Pure power-law mass beyond the cut.
        const double g_cut = g(cut);
        if (std::isfinite(g_cut)) tail_correction = g_cut * cut / (-*hints.at_infinity - 1.0);
      }
    } else {
      Piece tail{Piece::Kind::Exponential, start, scale, 1.0, 1.0, kInf};
      tail.u_min = 1e-300;
      pieces.push_back(tail);
    }
  } else {
    points.push_back(b);
    for (std::size_t i = 0; i + 1 < points.size(); ++i) add_range(points[i], points[i + 1]);
  }

  // Graded pieces at 0: near e = -1 the map r = u^k leaves double range while
  // the mass below is still visible, so the piece stops at a cut and the pure
  // power mass under it is added in closed form.
  if (a == 0.0 && hints.at_zero) {
    const double growth = *hints.at_zero + 1.0;
    for (auto& piece : pieces) {
      if (piece.kind != Piece::Kind::Finite || piece.origin != 0.0 || piece.sign != 1.0 || piece.k == 1.0) continue;
      const double first = piece.length;
      double cut = first * std::pow(10.0, -std::min(150.0, 20.0 / growth));
      auto usable = [&](double r) {
        try {
          const double v = g(r);
          return std::isfinite(v) && v != 0.0;
        } catch (const Error&) {
          return false;
        }
      };
      while (cut < 1e-3 * first && !usable(cut)) cut = std::sqrt(cut * first);
      const double g_cut = g(cut);
      if (!std::isfinite(g_cut)) continue;
      piece.u_min = std::pow(cut / first, 1.0 / piece.k);
      tail_correction += g_cut * cut / growth;
    }
  }

  std::priority_queue<detail::Segment> heap;
  double total = tail_correction;
  double total_err = 0.0;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    auto s = detail::kronrod_segment(g, pieces[i], i, pieces[i].u_min, 1.0, 0);
    total += s.value;
    total_err += s.error;
    heap.push(s);
  }

  int subdivisions = 0;
  std::vector<detail::Segment> finished;
  auto converged = [&] { return total_err <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total)); };
  while (!converged()) {
    if (heap.empty()) break;
    if (subdivisions >= cfg.max_subdivisions) {
      fail(ErrorKind::NonConvergent, "subdivision budget exhausted (estimate " + std::to_string(total) +
                                         ", error " + std::to_string(total_err) + ")");
    }
    auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b) || worst.depth > 200) {
      // Resolution limit of double precision: freeze this segment.
      finished.push_back(worst);
      continue;
    }
    const auto& piece = pieces[worst.piece];
    auto left = detail::kronrod_segment(g, piece, worst.piece, worst.a, mid, worst.depth + 1);
    auto right = detail::kronrod_segment(g, piece, worst.piece, mid, worst.b, worst.depth + 1);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++subdivisions;
  }

  // Re-sum to remove accumulated cancellation from the running updates.
  double value = tail_correction;
  double error = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  for (const auto& s : finished) {
    value += s.value;
    error += s.error;
  }
  if (error > std::max(cfg.abs_tol, cfg.rel_tol * std::abs(value)) * 10.0) {
    fail(ErrorKind::NonConvergent, "precision floor reached before tolerance (estimate " + std::to_string(value) +
                                       ", error " + std::to_string(error) + ")");
  }
  return {value, error, subdivisions};
}

/// Integral of g over (0, inf).
template <class F>
IntegralResult integrate_semiaxis(const F& g, const QuadratureConfig& cfg = {}, const EndpointHints& hints = {},
                                  std::span<const Singularity> singular_points = {}) {
  return integrate(g, 0.0, kInf, cfg, hints, singular_points);
}

/// Running integral F(r) = int_0^r g (or int_r^inf g for the outward
/// direction), stored exactly at breakpoints and completed between them by a
/// local quadrature from the nearest stored breakpoint. The completion is
/// monotone in r when g >= 0 and returns the stored value at every breakpoint.
class CumulativeIntegral {
 public:
  enum class Direction { FromZero, FromInfinity };

  CumulativeIntegral() = default;

  CumulativeIntegral(std::function<double(double)> g, std::vector<double> grid, Direction direction,
                     QuadratureConfig cfg, EndpointHints hints, std::vector<Singularity> singular_points)
      : g_(std::move(g)),
        direction_(direction),
        cfg_(cfg),
        hints_(hints),
        singular_(std::move(singular_points)) {
    for (double r : grid) {
      if (r > 0.0 && std::isfinite(r)) breakpoints_.push_back(r);
    }
    for (const auto& s : singular_) {
      if (s.at > 0.0 && std::isfinite(s.at)) breakpoints_.push_back(s.at);
    }
    std::sort(breakpoints_.begin(), breakpoints_.end());
    breakpoints_.erase(std::unique(breakpoints_.begin(), breakpoints_.end()), breakpoints_.end());
    if (direction_ == Direction::FromZero) {
      breakpoints_.insert(breakpoints_.begin(), 0.0);
      values_.assign(breakpoints_.size(), 0.0);
      for (std::size_t i = 1; i < breakpoints_.size(); ++i) {
        values_[i] = values_[i - 1] + piece(breakpoints_[i - 1], breakpoints_[i]);
      }
    } else {
      breakpoints_.push_back(kInf);
      values_.assign(breakpoints_.size(), 0.0);
      for (std::size_t i = breakpoints_.size() - 1; i-- > 0;) {
        values_[i] = values_[i + 1] + piece(breakpoints_[i], breakpoints_[i + 1]);
      }
    }
  }

  double operator()(double r) const {
    if (direction_ == Direction::FromZero) {
      if (r <= 0.0) return 0.0;
      if (r == kInf) return total_from_zero();
      auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), r);
      const std::size_t k = static_cast<std::size_t>(std::distance(breakpoints_.begin(), it)) - 1;
      if (breakpoints_[k] == r) return values_[k];
      return values_[k] + piece(breakpoints_[k], r);
    }
    if (r == kInf) return 0.0;
    if (r <= 0.0) r = 0.0;
    auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), r);
    const std::size_t k = static_cast<std::size_t>(std::distance(breakpoints_.begin(), it));
    if (breakpoints_[k] == r) return values_[k];
    return values_[k] + piece(r, breakpoints_[k]);
  }

  std::span<const double> breakpoints() const { return breakpoints_; }
  std::span<const double> values() const { return values_; }
  Direction direction() const { return direction_; }

 private:
  double total_from_zero() const { return values_.back() + piece(breakpoints_.back(), kInf); }

  double piece(double lo, double hi) const {
    EndpointHints h;
    if (lo == 0.0) h.at_zero = hints_.at_zero;
    if (hi == kInf) h.at_infinity = hints_.at_infinity;
    return integrate(g_, lo, hi, cfg_, h, singular_).value;
  }

  std::function<double(double)> g_;
  Direction direction_ = Direction::FromZero;
  QuadratureConfig cfg_;
  EndpointHints hints_;
  std::vector<Singularity> singular_;
  std::vector<double> breakpoints_;
  std::vector<double> values_;
};

/// `count` log-spaced radii in [lo, hi].
inline std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  std::vector<double> out;
  if (count == 0) return out;
  if (count == 1) return {lo};
  out.reserve(count);
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1)));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

}  // namespace revhardy
