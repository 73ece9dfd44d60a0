#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace aoi {

// SplitMix64 (Steele/Lea/Flood). Counter-based: the state advances by a fixed
// odd increment and the output is a bijective finalizer of the state, so a
// stream is fully determined by its starting key and the draw counter.
// Independent streams are derived by hashing (seed, replication, device)
// through the same finalizer.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t key) : state_(key) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return finalize(state_);
  }

  // Uniform on the open interval (0, 1); never returns 0 or 1, so logs of
  // either u or 1-u are safe.
  double next_unit_open() {
    const std::uint64_t bits = next_u64() >> 11;  // top 53 bits
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  }

  // Exponential with the given rate; rate 0 yields +infinity (event never
  // fires), which the event loops rely on for disabled devices.
  double next_exponential(double rate) {
    if (rate <= 0.0) return std::numeric_limits<double>::infinity();
    return -std::log(next_unit_open()) / rate;
  }

  static std::uint64_t finalize(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

private:
  std::uint64_t state_;
};

// Decorrelated stream for (seed, replication, device). Any 64-bit ids work;
// the two multipliers keep replication and device contributions in distinct
// subspaces before the final mix.
inline SplitMix64 make_stream(std::uint64_t seed, std::uint64_t replication,
                              std::uint64_t device) {
  std::uint64_t key = SplitMix64::finalize(seed);
  key = SplitMix64::finalize(key ^ (0xA24BAED4963EE407ULL * (replication + 1)));
  key = SplitMix64::finalize(key ^ (0x9FB21C651E98DF25ULL * (device + 1)));
  return SplitMix64(key);
}

}  // namespace aoi
