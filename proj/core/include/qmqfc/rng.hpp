#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace qmqfc {

/// Counter-based random stream.
///
/// Each (seed, domain, index) triple keys an independent SplitMix64 sequence,
/// so trial i draws the same numbers whether it runs first, last, or on
/// another thread. Satisfies UniformRandomBitGenerator.
class CounterStream {
 public:
  using result_type = std::uint64_t;

  CounterStream(std::uint64_t seed, std::uint64_t index, std::uint64_t domain = 0) noexcept
      : state_(mix(mix(seed ^ (domain * 0xD6E8FEB86659FD93ULL)) +
                   (index + 1) * 0x9E3779B97F4A7C15ULL)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  /// Uniform double in (0, 1].
  double uniform_open_closed() noexcept {
    return static_cast<double>((operator()() >> 11) + 1) * 0x1.0p-53;
  }

  /// Bernoulli trial against a threshold from bernoulli_threshold().
  bool bernoulli(std::uint64_t threshold) noexcept { return operator()() < threshold; }

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Integer threshold t with P(u64 < t) = probability (to 2^-64).
inline std::uint64_t bernoulli_threshold(double probability) noexcept {
  if (!(probability > 0.0)) return 0;
  if (probability >= 1.0) return std::numeric_limits<std::uint64_t>::max();
  const double scaled = std::ldexp(probability, 64);
  if (scaled >= 0x1.0p64) return std::numeric_limits<std::uint64_t>::max();
  return static_cast<std::uint64_t>(scaled);
}

}  // namespace qmqfc
