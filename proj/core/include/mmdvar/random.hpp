#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace mmdvar {

/// Independent random stream for one (seed, stream index) pair, so
/// replicate r sees the same numbers however replicates are scheduled.
///
/// Engine: std::mt19937_64 (fully specified output sequence) seeded by a
/// splitmix64 mix of seed and index. Normals: Box-Muller on 53-bit
/// uniforms in the open interval (0, 1).
class StreamRng {
 public:
  StreamRng(std::uint64_t seed, std::uint64_t stream)
      : engine_(mix(mix(seed) ^ (stream + 0x9e3779b97f4a7c15ULL))) {}

  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double theta = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  double normal(double mean, double variance) {
    return mean + std::sqrt(variance) * normal();
  }

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace mmdvar
