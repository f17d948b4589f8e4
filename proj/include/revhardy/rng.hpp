#pragma once

// Counter-based random stream keyed by (seed, stream id).
//
// Draw i of stream s under seed k is a pure function of (k, s, i), so workers
// that own disjoint stream ids produce independent, reproducible sequences
// regardless of scheduling. Mixing uses the SplitMix64 finalizer.

#include <cstdint>
#include <limits>

namespace revhardy {

namespace detail {

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

class CounterRng {
 public:
  using result_type = std::uint64_t;

  constexpr CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : key_(detail::mix64(detail::mix64(seed + 0x9e3779b97f4a7c15ULL) ^
                           (stream * 0xd1b54a32d192ed03ULL + 0x632be59bd9b4e019ULL))),
        seed_(seed),
        stream_(stream) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept {
    return detail::mix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_);
  }

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  constexpr double uniform() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  constexpr double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Independent child stream; children of distinct ids never overlap.
  constexpr CounterRng split(std::uint64_t child) const noexcept {
    return CounterRng(seed_, detail::mix64(stream_ * 0x9e3779b97f4a7c15ULL + child + 1));
  }

  constexpr std::uint64_t seed() const noexcept { return seed_; }
  constexpr std::uint64_t stream() const noexcept { return stream_; }
  constexpr std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

}  // namespace revhardy
