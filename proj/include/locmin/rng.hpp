#pragma once

// Counter-based random streams.
//
// A stream is a (key, counter) pair; the i-th 64-bit output is a SplitMix64
// finalization of key + i * golden. Streams derived with child() get their
// own key, so the draws of trial t never depend on how many draws trial t-1
// made or on which thread ran it.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace locmin {

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit constexpr RandomStream(std::uint64_t seed = 0) noexcept
      : key_(mix64(seed + kGolden)) {}

  // Stream keyed by (master seed, index), e.g. (seed, trial).
  static constexpr RandomStream derive(std::uint64_t seed, std::uint64_t index) noexcept {
    return RandomStream(seed).child(index);
  }

  constexpr RandomStream child(std::uint64_t index) const noexcept {
    RandomStream s;
    s.key_ = mix64(key_ ^ mix64(index + 0xd1b54a32d192ed03ULL));
    return s;
  }

  constexpr std::uint64_t key() const noexcept { return key_; }

  constexpr std::uint64_t next_u64() noexcept {
    ++counter_;
    return mix64(key_ + counter_ * kGolden);
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }
  constexpr result_type operator()() noexcept { return next_u64(); }

  // Uniform on [0, 1).
  double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1).
  double uniform_open() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  // Standard normal by Box-Muller; the second variate of each pair is cached.
  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform_open()));
    const double phi = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(phi);
    has_spare_ = true;
    return r * std::cos(phi);
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace locmin
