#pragma once

#include <cmath>
#include <cstdint>

namespace eap {

/// SplitMix64 generator. Used by the synthetic data generators with explicit
/// stream splitting: each (scenario, time, point, channel) tuple seeds its own
/// stream, so a dataset is a pure function of the seed and is bit-reproducible
/// independent of draw order.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in the open interval (0, 1); never returns 0, safe for log().
  double uniform01() {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; consumes two uniforms per draw.
  double gaussian() {
    double u1 = uniform01();
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.141592653589793238462643383279502884 * u2);
  }

 private:
  std::uint64_t state_;
};

/// Derive a child stream key from a seed and up to three stream labels.
inline std::uint64_t stream_key(std::uint64_t seed, std::uint64_t a,
                                std::uint64_t b = 0, std::uint64_t c = 0) {
  auto mix = [](std::uint64_t x) {
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdULL;
    x ^= x >> 33;
    x *= 0xc4ceb9fe1a85ec53ULL;
    x ^= x >> 33;
    return x;
  };
  std::uint64_t k = mix(seed + 0x632be59bd9b4e019ULL);
  k = mix(k ^ (a + 0x9e3779b97f4a7c15ULL));
  k = mix(k ^ (b + 0xe7037ed1a0b428dbULL));
  k = mix(k ^ (c + 0x8ebc6af09c88c6e3ULL));
  return k;
}

}  // namespace eap
