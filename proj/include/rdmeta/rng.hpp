#pragma once

#include <cmath>
#include <cstdint>

namespace rdmeta {

/// Counter-based splittable generator. A stream is keyed by (seed, stream):
/// replicas get independent, reproducible sequences and can run concurrently.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : state_(mix(mix(seed + 0x632BE59BD9B4E019ULL) ^
                   (0x9E3779B97F4A7C15ULL * (stream + 1)))) {}

  std::uint64_t next_u64() noexcept {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  /// Uniform in [0,1).
  double next_unit() noexcept { return double(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo,hi).
  double next_range(double lo, double hi) noexcept { return lo + (hi - lo) * next_unit(); }

  /// Exponential with the given rate; finite for all draws.
  double next_exp(double rate) noexcept { return -std::log1p(-next_unit()) / rate; }

  /// Uniform integer in [0,n).
  std::uint64_t next_below(std::uint64_t n) noexcept { return next_u64() % n; }

  /// Standard normal (Box-Muller, one value per call).
  double next_normal() noexcept {
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = next_unit();
    double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) noexcept {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace rdmeta
