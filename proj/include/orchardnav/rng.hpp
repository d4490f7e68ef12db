#pragma once

#include <cmath>
#include <cstdint>

namespace orchard {

/// Fixed, documented generators so clouds regenerate identically everywhere:
/// SplitMix64 derives per-stream seeds, xoshiro256** produces the samples.
/// Streams are independent, so adding a tree never reshuffles another
/// tree's points.

struct SplitMix64 {
  std::uint64_t state;
  explicit SplitMix64(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
};

class Xoshiro256ss {
public:
  Xoshiro256ss(std::uint64_t seed, std::uint64_t stream) {
    SplitMix64 sm(seed ^ (0xD1B54A32D192ED03ULL * (stream + 1)));
    for (auto& w : s_) w = sm.next();
    s_[0] |= 1;  // never all-zero
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Box-Muller; one value per call, two uniforms consumed.
  double gaussian(double sigma) {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return sigma * std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  /// Gaussian clipped by resampling until |v| < 5 sigma.
  double gaussian_clipped(double sigma) {
    if (sigma == 0.0) return 0.0;
    double v = gaussian(sigma);
    while (std::abs(v) >= 5.0 * sigma) v = gaussian(sigma);
    return v;
  }

private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t s_[4];
};

}  // namespace orchard
