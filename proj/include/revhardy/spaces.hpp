#pragma once

// Metric measure spaces with polar decomposition, and the homogeneous groups
// they are built from.
//
// Shipped instances:
//   euclidean:<n>   (R^n, +), n in {1, 2, 3}, Euclidean norm, Q = n
//   heisenberg:1    H^1 with (a,b,c)(a',b',c') = (a+a', b+b', c+c'+(ab'-ba')/2),
//                   dilations (sa, sb, s^2 c), Koranyi norm, Q = 4
//   hyperbolic:<n>  radial model only, density sinh(r)^(n-1)
//
// The sphere measure is normalised by |S| = Q vol(B(0,1)), so that
// int_{B(0,r)} |x|^g dx = |S| r^(Q+g) / (Q+g).

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "revhardy/errors.hpp"
#include "revhardy/estimate.hpp"
#include "revhardy/quadrature.hpp"
#include "revhardy/radial.hpp"
#include "revhardy/rng.hpp"

namespace revhardy {

inline constexpr std::size_t kMaxDim = 3;

/// Group coordinates (at most kMaxDim of them).
class Point {
 public:
  Point() = default;
  explicit Point(std::size_t n) : n_(n) {
    if (n > kMaxDim) fail(ErrorKind::InvalidParams, "point dimension exceeds " + std::to_string(kMaxDim));
  }
  Point(std::initializer_list<double> coords) : Point(coords.size()) {
    std::copy(coords.begin(), coords.end(), c_.begin());
  }

  double& operator[](std::size_t i) { return c_[i]; }
  double operator[](std::size_t i) const { return c_[i]; }
  std::size_t size() const { return n_; }
  std::span<const double> coords() const { return {c_.data(), n_}; }

  bool finite() const {
    return std::all_of(c_.begin(), c_.begin() + static_cast<std::ptrdiff_t>(n_), [](double v) { return std::isfinite(v); });
  }

  friend bool operator==(const Point&, const Point&) = default;

 private:
  std::array<double, kMaxDim> c_{};
  std::size_t n_ = 0;
};

class HomogeneousGroup {
 public:
  enum class Kind { Abelian, Heisenberg };

  static HomogeneousGroup euclidean(int n) {
    if (n < 1 || n > static_cast<int>(kMaxDim)) {
      fail(ErrorKind::ConfigError, "euclidean dimension must be 1, 2 or 3");
    }
    HomogeneousGroup g;
    g.kind_ = Kind::Abelian;
    g.dim_ = static_cast<std::size_t>(n);
    g.weights_.assign(g.dim_, 1.0);
    g.name_ = "euclidean:" + std::to_string(n);
    return g;
  }

  static HomogeneousGroup heisenberg() {
    HomogeneousGroup g;
    g.kind_ = Kind::Heisenberg;
    g.dim_ = 3;
    g.weights_ = {1.0, 1.0, 2.0};
    g.name_ = "heisenberg:1";
    return g;
  }

  Kind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  const std::string& name() const { return name_; }
  std::span<const double> dilation_weights() const { return weights_; }
  double homogeneous_dim() const {
    double q = 0.0;
    for (double w : weights_) q += w;
    return q;
  }

  /// Constant C in |xy| <= C (|x| + |y|). Both shipped norms are subadditive
  /// (Euclidean triangle inequality; the Koranyi gauge by Cygan's theorem).
  double triangle_constant() const { return 1.0; }

  Point identity() const { return Point(dim_); }

  Point product(const Point& x, const Point& y) const {
    Point z(dim_);
    for (std::size_t i = 0; i < dim_; ++i) z[i] = x[i] + y[i];
    if (kind_ == Kind::Heisenberg) z[2] += 0.5 * (x[0] * y[1] - x[1] * y[0]);
    return z;
  }

  Point inverse(const Point& x) const {
    Point z(dim_);
    for (std::size_t i = 0; i < dim_; ++i) z[i] = -x[i];
    return z;
  }

  Point dilate(double s, const Point& x) const {
    Point z(dim_);
    for (std::size_t i = 0; i < dim_; ++i) z[i] = std::pow(s, weights_[i]) * x[i];
    return z;
  }

  double norm(const Point& x) const {
    if (kind_ == Kind::Heisenberg) {
      const double rho2 = x[0] * x[0] + x[1] * x[1];
      return std::sqrt(std::sqrt(rho2 * rho2 + 16.0 * x[2] * x[2]));
    }
    double s = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) s += x[i] * x[i];
    return std::sqrt(s);
  }

  /// |y^-1 x|
  double kernel_norm(const Point& x, const Point& y) const { return norm(product(inverse(y), x)); }

  /// Largest |x_k| on the closed unit ball. Both norms grow with each |x_k|
  /// separately, so the extent is attained on the coordinate axis.
  std::array<double, kMaxDim> unit_ball_extents() const {
    std::array<double, kMaxDim> e{};
    for (std::size_t k = 0; k < dim_; ++k) e[k] = extent(Point(dim_), k);
    return e;
  }

  /// sup { t >= 0 : |prefix with x_k = t and later coordinates 0| <= 1 }.
  double extent(Point prefix, std::size_t k) const {
    for (std::size_t j = k; j < dim_; ++j) prefix[j] = 0.0;
    if (norm(prefix) >= 1.0) return 0.0;
    double lo = 0.0;
    double hi = 1.0;
    auto inside = [&](double t) {
      prefix[k] = t;
      return norm(prefix) <= 1.0;
    };
    while (inside(hi)) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-17 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (inside(mid) ? lo : hi) = mid;
    }
    return lo;
  }

 private:
  HomogeneousGroup() = default;

  Kind kind_ = Kind::Abelian;
  std::size_t dim_ = 1;
  std::vector<double> weights_;
  std::string name_;
};

/// |y^-1 x| through the group law.
inline double kernel_norm(const HomogeneousGroup& group, const Point& x, const Point& y) {
  return group.kernel_norm(x, y);
}

namespace detail {

inline double slice_volume(const HomogeneousGroup& g, Point prefix, std::size_t k, const QuadratureConfig& cfg) {
  const double e = g.extent(prefix, k);
  if (e <= 0.0) return 0.0;
  if (k + 1 == g.dim()) return 2.0 * e;
  const std::array<Singularity, 1> edge{Singularity{e, 0.5}};
  auto inner = [&](double t) {
    Point p = prefix;
    p[k] = t;
    return slice_volume(g, p, k + 1, cfg);
  };
  return 2.0 * integrate(inner, 0.0, e, cfg, {}, edge).value;
}

}  // namespace detail

/// vol(B(0,1)) by nested coordinate quadrature over the sign-symmetric ball.
inline double unit_ball_volume_quadrature(const HomogeneousGroup& g, const QuadratureConfig& cfg = {1e-11, 1e-14}) {
  return detail::slice_volume(g, Point(g.dim()), 0, cfg);
}

/// vol(B(0,radius)) by uniform sampling of the dilated bounding box.
inline MCEstimate ball_volume_mc(const HomogeneousGroup& g, double radius, std::uint64_t n_samples,
                                 std::uint64_t seed, std::uint64_t stream = 0) {
  if (!(radius > 0.0) || n_samples < 2) fail(ErrorKind::InvalidParams, "ball volume needs radius > 0 and >= 2 samples");
  const auto unit = g.unit_ball_extents();
  std::array<double, kMaxDim> box{};
  double box_volume = 1.0;
  for (std::size_t k = 0; k < g.dim(); ++k) {
    box[k] = std::pow(radius, g.dilation_weights()[k]) * unit[k];
    box_volume *= 2.0 * box[k];
  }
  CounterRng rng(seed, stream);
  RunningMoments acc;
  Point x(g.dim());
  for (std::uint64_t i = 0; i < n_samples; ++i) {
    for (std::size_t k = 0; k < g.dim(); ++k) x[k] = rng.uniform(-box[k], box[k]);
    acc.add(g.norm(x) < radius ? box_volume : 0.0);
  }
  return acc.estimate(seed);
}

enum class VolumeMethod { Quadrature, MonteCarlo };

/// |S| = Q vol(B(0,1)).
inline double sphere_area(const HomogeneousGroup& g, VolumeMethod method = VolumeMethod::Quadrature,
                          std::uint64_t mc_samples = 1'000'000, std::uint64_t seed = 1) {
  const double q = g.homogeneous_dim();
  if (method == VolumeMethod::Quadrature) return q * unit_ball_volume_quadrature(g);
  return q * ball_volume_mc(g, 1.0, mc_samples, seed).mean;
}

/// sphere_area(g) by quadrature, computed once per shipped group.
inline double group_sphere_area(const HomogeneousGroup& g) {
  if (g.kind() == HomogeneousGroup::Kind::Heisenberg) {
    static const double heis = sphere_area(g);
    return heis;
  }
  static const std::array<double, kMaxDim> euc = {sphere_area(HomogeneousGroup::euclidean(1)),
                                                   sphere_area(HomogeneousGroup::euclidean(2)),
                                                   sphere_area(HomogeneousGroup::euclidean(3))};
  return euc[g.dim() - 1];
}

/// Largest observed |xy| / (|x| + |y|) over random pairs.
inline double estimate_triangle_constant(const HomogeneousGroup& g, std::uint64_t n_pairs, std::uint64_t seed) {
  CounterRng rng(seed, 7);
  double worst = 0.0;
  for (std::uint64_t i = 0; i < n_pairs; ++i) {
    Point x(g.dim()), y(g.dim());
    const double sx = std::exp(rng.uniform(-3.0, 3.0));
    const double sy = std::exp(rng.uniform(-3.0, 3.0));
    for (std::size_t k = 0; k < g.dim(); ++k) {
      x[k] = sx * rng.uniform(-1.0, 1.0);
      y[k] = sy * rng.uniform(-1.0, 1.0);
    }
    const double denom = g.norm(x) + g.norm(y);
    if (denom > 0.0) worst = std::max(worst, g.norm(g.product(x, y)) / denom);
  }
  return worst;
}

class PolarSpace {
 public:
  enum class Kind { Euclidean, Heisenberg, Hyperbolic };

  static PolarSpace euclidean(int n) {
    PolarSpace s(Kind::Euclidean, HomogeneousGroup::euclidean(n));
    s.topological_dim_ = n;
    s.q_ = n;
    s.name_ = "euclidean:" + std::to_string(n);
    s.sphere_area_ = group_sphere_area(s.group_.value());
    return s;
  }

  static PolarSpace heisenberg() {
    PolarSpace s(Kind::Heisenberg, HomogeneousGroup::heisenberg());
    s.topological_dim_ = 3;
    s.q_ = 4.0;
    s.name_ = "heisenberg:1";
    s.sphere_area_ = group_sphere_area(s.group_.value());
    return s;
  }

  static PolarSpace hyperbolic(int n) {
    if (n < 1 || n > static_cast<int>(kMaxDim)) fail(ErrorKind::ConfigError, "hyperbolic dimension must be 1, 2 or 3");
    PolarSpace s(Kind::Hyperbolic, std::nullopt);
    s.topological_dim_ = n;
    s.q_ = n;
    s.name_ = "hyperbolic:" + std::to_string(n);
    s.sphere_area_ = group_sphere_area(HomogeneousGroup::euclidean(n));
    return s;
  }

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  int topological_dim() const { return topological_dim_; }
  double homogeneous_dim() const { return q_; }
  double sphere_area() const { return sphere_area_; }
  const std::optional<HomogeneousGroup>& group() const { return group_; }
  double radius_limit() const { return radius_limit_; }

  /// Radial density: r^(Q-1), or sinh(r)^(n-1) for hyperbolic space.
  double density(double r) const {
    if (kind_ == Kind::Hyperbolic) return std::pow(std::sinh(r), topological_dim_ - 1);
    return std::pow(r, q_ - 1.0);
  }

  double density_exponent_at_zero() const {
    return kind_ == Kind::Hyperbolic ? static_cast<double>(topological_dim_ - 1) : q_ - 1.0;
  }

  /// Power-law exponent at infinity; empty when the density grows exponentially.
  std::optional<double> density_exponent_at_infinity() const {
    if (kind_ == Kind::Hyperbolic) {
      if (topological_dim_ == 1) return 0.0;
      return std::nullopt;
    }
    return q_ - 1.0;
  }

  bool power_law() const { return density_exponent_at_infinity().has_value(); }

  /// The same space restricted to the ball of the given radius.
  PolarSpace truncated(double radius) const {
    if (!(radius > 0.0)) fail(ErrorKind::InvalidParams, "truncation radius must be positive");
    PolarSpace s = *this;
    s.radius_limit_ = std::min(radius_limit_, radius);
    return s;
  }

  /// |S| * density as a radial function.
  RadialFunction measure() const {
    const PolarSpace self = *this;
    return RadialFunction([self](double r) { return self.sphere_area_ * self.density(r); }, density_exponent_at_zero(),
                          density_exponent_at_infinity(), {}, 0.0, kInf, "|S|*density");
  }

 private:
  PolarSpace(Kind kind, std::optional<HomogeneousGroup> group) : kind_(kind), group_(std::move(group)) {}

  Kind kind_;
  std::optional<HomogeneousGroup> group_;
  int topological_dim_ = 1;
  double q_ = 1.0;
  double sphere_area_ = 0.0;
  double radius_limit_ = kInf;
  std::string name_;
};

/// Parses `euclidean:<n>`, `heisenberg:1` or `hyperbolic:<n>`.
inline PolarSpace parse_space(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) fail(ErrorKind::ConfigError, "space must look like kind:<n>, got '" + std::string(text) + "'");
  const auto kind = text.substr(0, colon);
  const auto arg = text.substr(colon + 1);
  int n = 0;
  const auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), n);
  if (ec != std::errc{} || ptr != arg.data() + arg.size()) {
    fail(ErrorKind::ConfigError, "space dimension must be an integer, got '" + std::string(arg) + "'");
  }
  if (kind == "euclidean") return PolarSpace::euclidean(n);
  if (kind == "hyperbolic") return PolarSpace::hyperbolic(n);
  if (kind == "heisenberg") {
    if (n != 1) fail(ErrorKind::ConfigError, "only heisenberg:1 is available");
    return PolarSpace::heisenberg();
  }
  fail(ErrorKind::ConfigError, "unknown space kind '" + std::string(kind) + "'");
}

namespace detail {

inline std::vector<Singularity> regular_breakpoints(const RadialFunction& g) {
  std::vector<Singularity> out;
  for (double b : g.breakpoints()) out.push_back({b, 0.0});
  return out;
}

}  // namespace detail

/// |S| int_{r_lo}^{r_hi} g(r) density(r) dr, clipped to the support of g and
/// to the radius limit of the space.
inline double polar_integrate(const PolarSpace& space, const RadialFunction& g, double r_lo, double r_hi,
                              const QuadratureConfig& cfg = {}) {
  const double lo = std::max(r_lo, g.support_begin());
  const double hi = std::min({r_hi, g.support_end(), space.radius_limit()});
  if (!(hi > lo)) return 0.0;
  const RadialFunction integrand = g * space.measure();
  EndpointHints hints;
  if (lo == 0.0) hints.at_zero = integrand.exponent_at_zero();
  if (hi == kInf) {
    hints.at_infinity = integrand.exponent_at_infinity();
    if (!space.power_law() && g.exponent_at_infinity()) {
      fail(ErrorKind::DivergentIntegral, "power-law integrand against exponentially growing density on " + space.name());
    }
  }
  QuadratureConfig c = cfg;
  if (hi == kInf && !space.power_law()) c.infinity_transform = InfinityTransform::Exponential;
  const auto sing = detail::regular_breakpoints(integrand);
  return integrate(integrand, lo, hi, c, hints, sing).value;
}

/// Running integral of g * |S| * density, from 0 outward or from infinity
/// inward, cached on `grid` plus the breakpoints of g.
inline CumulativeIntegral cumulative(const PolarSpace& space, const RadialFunction& g, std::span<const double> grid,
                                     CumulativeIntegral::Direction direction, const QuadratureConfig& cfg = {}) {
  const double limit = std::min(space.radius_limit(), g.support_end());
  const RadialFunction integrand = g.restricted(0.0, limit) * space.measure();
  EndpointHints hints;
  hints.at_zero = integrand.exponent_at_zero();
  hints.at_infinity = integrand.exponent_at_infinity();
  if (direction == CumulativeIntegral::Direction::FromZero && g.support_begin() == 0.0 && hints.at_zero &&
      *hints.at_zero <= -1.0) {
    fail(ErrorKind::DivergentIntegral, "integrand is not locally integrable at 0");
  }
  if (direction == CumulativeIntegral::Direction::FromInfinity && limit == kInf && hints.at_infinity &&
      *hints.at_infinity >= -1.0) {
    fail(ErrorKind::DivergentIntegral, "integrand is not integrable at infinity");
  }
  std::vector<double> points(grid.begin(), grid.end());
  if (limit < kInf) points.push_back(limit);
  auto sing = detail::regular_breakpoints(integrand);
  return CumulativeIntegral([integrand](double r) { return integrand(r); }, std::move(points), direction, cfg, hints,
                            std::move(sing));
}

}  // namespace revhardy
