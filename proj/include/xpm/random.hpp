#pragma once

#include <cmath>
#include <cstdint>

namespace xpm {

// Deterministic value-type random stream (SplitMix64 core, Box-Muller
// normals). Streams derived with for_sample(seed, i) depend only on
// (seed, i), never on which thread consumes them, so Monte Carlo estimates
// are bit-identical under any execution schedule.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : state_(seed) {}

  // Stream for the i-th sample of a run keyed by master_seed.
  static RandomStream for_sample(std::uint64_t master_seed, std::uint64_t index) {
    return RandomStream(mix(master_seed + 0x9E3779B97F4A7C15ULL * (index + 1)));
  }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; the second deviate of each pair is cached.
  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    cached_ = r * std::sin(a);
    has_cached_ = true;
    return r * std::cos(a);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t state_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

// Derived seed for a sub-task (e.g. one sweep point) of a run keyed by seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return RandomStream::for_sample(seed, index).next_u64();
}

}  // namespace xpm
