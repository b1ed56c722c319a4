#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace patchattn {

// Splittable counter-based generator built on SplitMix64 (Steele, Lea &
// Flood 2014).  A stream is addressed by (master_seed, stream_id); every
// sampling site derives its own stream, so per-point parallel sampling and
// sequential sampling produce the same values.
//
// Draw identities, fixed for reproducibility:
//   uniform01  : (x >> 11) * 2^-53                 in [0, 1)
//   gaussian   : Box-Muller on (0,1] uniforms, spare value cached
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(mix(seed)) {}

  Rng(std::uint64_t master_seed, std::uint64_t stream_id)
      : state_(mix(mix(master_seed) ^
                   (0x9E3779B97F4A7C15ULL * (stream_id + 1)))) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // [0, 1)
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // (0, 1]
  double uniform01_open() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform01_open();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  // Unbiased integer in [0, n) by rejection.
  std::int64_t below(std::int64_t n) {
    if (n <= 0) throw std::invalid_argument("Rng::below: n must be positive");
    const std::uint64_t un = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % un;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return static_cast<std::int64_t>(x % un);
  }

  int sign() { return (next_u64() & 1u) ? 1 : -1; }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Stream ids used across the project.  Per-point streams add the point index
// to the block base, so blocks are spaced far apart.
namespace streams {
constexpr std::uint64_t kFeature = 1;
constexpr std::uint64_t kPartition = 2;
constexpr std::uint64_t kInitParams = 3;
constexpr std::uint64_t kEval = 4;
constexpr std::uint64_t kDataPointBase = 1ULL << 32;
constexpr std::uint64_t kEvalPointBase = 3ULL << 32;
}  // namespace streams

}  // namespace patchattn
