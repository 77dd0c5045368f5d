#pragma once

// Seedable, splittable random source.
//
// Streams: the seed for substream k of a base seed is derived with SplitMix64
// from (seed, k), so replication k draws the same numbers no matter which
// thread runs it or in what order.
//
// Uniforms: the top 53 bits of a std::mt19937_64 output, scaled by 2^-53.
// Normals: Box-Muller, r = sqrt(-2 ln u1), theta = 2 pi u2, u1 in (0, 1],
// returning r cos(theta) and then the cached r sin(theta).
// Both mt19937_64 and these transforms are fully specified, so a seed
// reproduces the same values on any conforming platform with the same libm.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace unifactor {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t s = seed;
  const std::uint64_t a = splitmix64(s);
  s = a ^ (stream * 0xD1B54A32D192ED03ULL);
  splitmix64(s);
  return splitmix64(s);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Generator for substream `stream` of `seed`.
  static Rng for_stream(std::uint64_t seed, std::uint64_t stream) {
    return Rng(derive_stream_seed(seed, stream));
  }

  /// [0, 1)
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// [lo, hi], exactly lo when lo == hi.
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool coin() { return (engine_() >> 63) != 0; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace unifactor
