#pragma once

#include <cstdint>

namespace schedlp {

/// Deterministic 64-bit generator (splitmix64). Chosen over std engines so
/// that streams are identical across standard library implementations.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform on the half-open-from-below interval (0, 1]. Never returns 0,
  /// which matches the scheduling intervals' (a, b] convention.
  double next_open_closed() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  /// Uniform on [0, 1).
  double next_closed_open() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [lo, hi] inclusive.
  std::int64_t next_int(std::int64_t lo, std::int64_t hi) {
    std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    // Rejection sampling keeps the draw exactly uniform.
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return lo + static_cast<std::int64_t>(v % span);
  }

  bool next_bernoulli(double p) { return next_closed_open() < p; }

private:
  std::uint64_t state_;
};

/// Seed-splitting rule used everywhere a master seed spawns child streams:
/// child(seed, k) = splitmix64_mix(seed XOR (0x9E3779B97F4A7C15 * (k + 1))).
/// Documented in the README; reports and trial logs depend on it.
inline std::uint64_t split_seed(std::uint64_t parent, std::uint64_t index) {
  std::uint64_t z = parent ^ (0x9E3779B97F4A7C15ULL * (index + 1));
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace schedlp
