#pragma once

// Seeded Monte Carlo on G x G.
//
// Radii are drawn from rho(r) ~ r^a on (r_min, 1] and r^b on (1, r_max],
// continuous at 1, by inverse CDF. Directions are uniform points of the unit
// ball pushed to the unit quasi-sphere by the dilation d_{1/|w|}; the induced
// surface measure is the polar measure with total mass |S| = Q vol(B(0,1)), so
// a point x has density rho(|x|) / (|S| |x|^(Q-1)).
//
// Pairs come either from a product density or from a kernel-adapted mixture:
// draw w = y^-1 x with a radial law matched to |w|^lambda, then complete the
// pair from x (y = x w^-1) or from y (x = y w) with equal probability. Both
// completions are Haar-measure preserving.
//
// Samples are processed in fixed chunks; chunk c draws from stream c + 1 of
// the seed, and chunk moments merge in chunk order. The estimate is therefore
// bit-identical for any thread count.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>

#include "revhardy/errors.hpp"
#include "revhardy/estimate.hpp"
#include "revhardy/parallel.hpp"
#include "revhardy/quadrature.hpp"
#include "revhardy/rng.hpp"
#include "revhardy/spaces.hpp"

namespace revhardy {

inline constexpr std::uint64_t kMcChunk = 8192;

namespace detail {

/// int_lo^hi r^e dr
inline double power_mass(double e, double lo, double hi) {
  if (!(hi > lo)) return 0.0;
  if (std::abs(e + 1.0) < 1e-12) return std::log(hi / lo);
  return (std::pow(hi, e + 1.0) - std::pow(lo, e + 1.0)) / (e + 1.0);
}

/// r with int_lo^r s^e ds = m.
inline double power_inverse(double e, double lo, double m) {
  if (std::abs(e + 1.0) < 1e-12) return lo * std::exp(m);
  return std::pow(std::pow(lo, e + 1.0) + (e + 1.0) * m, 1.0 / (e + 1.0));
}

}  // namespace detail

class RadialSampler {
 public:
  RadialSampler() : RadialSampler(0.0, -2.0) {}

  RadialSampler(double a, double b, double r_min = 0.0, double r_max = kInf)
      : a_(a), b_(b), r_min_(r_min), r_max_(r_max) {
    if (!(r_min >= 0.0) || !(r_max > r_min) || !std::isfinite(a) || !std::isfinite(b)) {
      fail(ErrorKind::DegenerateSampler, "radial sampler needs 0 <= r_min < r_max and finite exponents");
    }
    if (r_min == 0.0 && r_max > 0.0 && a <= -1.0) {
      fail(ErrorKind::DegenerateSampler, "radial sampler exponent at 0 must exceed -1");
    }
    if (r_max == kInf && b >= -1.0) fail(ErrorKind::DegenerateSampler, "radial sampler exponent at infinity must be below -1");
    lo_hi_ = std::min(1.0, r_max_);
    hi_lo_ = std::max(1.0, r_min_);
    mass_lo_ = detail::power_mass(a_, r_min_, lo_hi_);
    // b-piece is scaled to be continuous at 1 (r^b = r^a there).
    mass_hi_ = detail::power_mass(b_, hi_lo_, r_max_);
    total_ = mass_lo_ + mass_hi_;
    if (!(total_ > 0.0) || !std::isfinite(total_)) fail(ErrorKind::DegenerateSampler, "radial sampler has no mass");
  }

  double sample(CounterRng& rng) const {
    const double m = rng.uniform() * total_;
    double r;
    if (m < mass_lo_) {
      r = detail::power_inverse(a_, r_min_, m);
    } else {
      r = detail::power_inverse(b_, hi_lo_, m - mass_lo_);
    }
    return std::clamp(r, std::max(r_min_, std::numeric_limits<double>::min()), r_max_);
  }

  double pdf(double r) const {
    if (r < r_min_ || r > r_max_ || r <= 0.0) return 0.0;
    return (r <= 1.0 ? std::pow(r, a_) : std::pow(r, b_)) / total_;
  }

  double a() const { return a_; }
  double b() const { return b_; }
  double r_min() const { return r_min_; }
  double r_max() const { return r_max_; }

 private:
  double a_, b_, r_min_, r_max_;
  double lo_hi_ = 1.0, hi_lo_ = 1.0;
  double mass_lo_ = 0.0, mass_hi_ = 0.0, total_ = 0.0;
};

/// Radial law on a homogeneous group.
class PointSampler {
 public:
  PointSampler(HomogeneousGroup group, RadialSampler radial)
      : group_(std::move(group)), radial_(radial), area_(group_sphere_area(group_)),
        q_(group_.homogeneous_dim()), extents_(group_.unit_ball_extents()) {}

  Point sample(CounterRng& rng) const { return on_sphere(rng, radial_.sample(rng)); }

  double density(const Point& x) const {
    const double r = group_.norm(x);
    if (r <= 0.0) return 0.0;
    return radial_.pdf(r) / (area_ * std::pow(r, q_ - 1.0));
  }

  /// Uniform point of the unit ball dilated to norm r.
  Point on_sphere(CounterRng& rng, double r) const {
    Point w(group_.dim());
    for (int attempt = 0; attempt < 10000; ++attempt) {
      for (std::size_t k = 0; k < group_.dim(); ++k) w[k] = rng.uniform(-extents_[k], extents_[k]);
      const double n = group_.norm(w);
      if (n < 1.0 && n > 1e-12) return group_.dilate(r / n, w);
    }
    fail(ErrorKind::DegenerateSampler, "direction rejection sampling failed");
  }

  const RadialSampler& radial() const { return radial_; }
  const HomogeneousGroup& group() const { return group_; }

 private:
  HomogeneousGroup group_;
  RadialSampler radial_;
  double area_;
  double q_;
  std::array<double, kMaxDim> extents_;
};

struct PairSample {
  Point x;
  Point y;
  double density = 0.0;
};

/// Importance density on G x G.
class PairSampler {
 public:
  enum class Mode { Product, KernelAdapted };

  static PairSampler product(const HomogeneousGroup& g, RadialSampler x, RadialSampler y) {
    return PairSampler(Mode::Product, g, x, y, y);
  }

  static PairSampler kernel_adapted(const HomogeneousGroup& g, RadialSampler x, RadialSampler y, RadialSampler w) {
    return PairSampler(Mode::KernelAdapted, g, x, y, w);
  }

  Mode mode() const { return mode_; }
  const HomogeneousGroup& group() const { return px_.group(); }

  PairSample sample(CounterRng& rng) const {
    const auto& g = px_.group();
    PairSample s;
    if (mode_ == Mode::Product) {
      s.x = px_.sample(rng);
      s.y = py_.sample(rng);
      s.density = px_.density(s.x) * py_.density(s.y);
      return s;
    }
    const bool from_x = rng.uniform() < 0.5;
    const Point w = pw_.sample(rng);
    if (from_x) {
      s.x = px_.sample(rng);
      s.y = g.product(s.x, g.inverse(w));
    } else {
      s.y = py_.sample(rng);
      s.x = g.product(s.y, w);
    }
    s.density = density(s.x, s.y);
    return s;
  }

  double density(const Point& x, const Point& y) const {
    if (mode_ == Mode::Product) return px_.density(x) * py_.density(y);
    const auto& g = px_.group();
    const Point w = g.product(g.inverse(y), x);
    return 0.5 * pw_.density(w) * (px_.density(x) + py_.density(y));
  }

 private:
  PairSampler(Mode mode, const HomogeneousGroup& g, RadialSampler x, RadialSampler y, RadialSampler w)
      : mode_(mode), px_(g, x), py_(g, y), pw_(g, w) {}

  Mode mode_;
  PointSampler px_;
  PointSampler py_;
  PointSampler pw_;
};

/// Estimate of int int F(x, y) dx dy under the given importance density.
template <class F>
MCEstimate mc_pair_integrate(const F& integrand, const PairSampler& sampler, std::uint64_t n_samples,
                             std::uint64_t seed, unsigned threads = 0) {
  if (n_samples < 2) fail(ErrorKind::ConfigError, "mc_samples must be at least 2");
  const std::uint64_t chunks = (n_samples + kMcChunk - 1) / kMcChunk;
  auto parts = parallel_map(
      static_cast<std::size_t>(chunks),
      [&](std::size_t c) {
        CounterRng rng(seed, c + 1);
        const std::uint64_t begin = c * kMcChunk;
        const std::uint64_t end = std::min(n_samples, begin + kMcChunk);
        RunningMoments acc;
        for (std::uint64_t i = begin; i < end; ++i) {
          const PairSample s = sampler.sample(rng);
          const double value = integrand(s.x, s.y);
          if (value == 0.0) {
            acc.add(0.0);
            continue;
          }
          if (!(s.density > 0.0)) {
            fail(ErrorKind::DegenerateSampler, "importance density vanishes where the integrand is positive");
          }
          const double weight = value / s.density;
          if (!std::isfinite(weight)) fail(ErrorKind::NonConvergent, "non-finite importance weight");
          acc.add(weight);
        }
        return acc;
      },
      threads);
  RunningMoments total;
  for (const auto& p : parts) total.merge(p);
  return total.estimate(seed);
}

/// int_{B(0,r)} g(|x|) dx by uniform sampling of the bounding box.
template <class G>
MCEstimate mc_ball_integral(const HomogeneousGroup& group, const G& g, double r, std::uint64_t n_samples,
                            std::uint64_t seed) {
  if (!(r > 0.0) || n_samples < 2) fail(ErrorKind::ConfigError, "ball integral needs r > 0 and >= 2 samples");
  const auto unit = group.unit_ball_extents();
  std::array<double, kMaxDim> box{};
  double box_volume = 1.0;
  for (std::size_t k = 0; k < group.dim(); ++k) {
    box[k] = std::pow(r, group.dilation_weights()[k]) * unit[k];
    box_volume *= 2.0 * box[k];
  }
  CounterRng rng(seed, 0x6261);
  RunningMoments acc;
  Point x(group.dim());
  for (std::uint64_t i = 0; i < n_samples; ++i) {
    for (std::size_t k = 0; k < group.dim(); ++k) x[k] = rng.uniform(-box[k], box[k]);
    const double n = group.norm(x);
    acc.add(n < r ? box_volume * g(n) : 0.0);
  }
  return acc.estimate(seed);
}

/// |S| = Q vol(B(0,1)) with the volume from Monte Carlo.
inline MCEstimate sphere_area_mc(const HomogeneousGroup& group, std::uint64_t n_samples, std::uint64_t seed) {
  MCEstimate v = ball_volume_mc(group, 1.0, n_samples, seed);
  const double q = group.homogeneous_dim();
  v.mean *= q;
  v.std_error *= q;
  return v;
}

}  // namespace revhardy
