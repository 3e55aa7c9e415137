#pragma once

#include <cstdint>
#include <cmath>

namespace gricci {

/// Counter-based random stream: every (seed, stream) pair gives an
/// independent deterministic sequence, so results are reproducible and
/// independent of how samples are distributed over threads.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream = 0)
      : state_(mix(mix(seed + 0x9e3779b97f4a7c15ULL) ^ mix(stream + 0xbf58476d1ce4e5b9ULL))) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  /// Uniform in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform in (0, 1]; safe as a log argument.
  double next_double_pos() { return 1.0 - next_double(); }

  double next_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u = next_double_pos();
    double v = next_double();
    double r = std::sqrt(-2.0 * std::log(u));
    spare_ = r * std::sin(2.0 * M_PI * v);
    have_spare_ = true;
    return r * std::cos(2.0 * M_PI * v);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
  }
  std::uint64_t state_;
  double spare_ = 0;
  bool have_spare_ = false;
};

}  // namespace gricci
