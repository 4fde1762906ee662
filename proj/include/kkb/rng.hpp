#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace kkb {

/// Counter-based generator built on the SplitMix64 finalizer: draw i of a
/// stream seeded with s is mix(s + (i+1)*gamma), a pure function of (s, i).
/// Substreams are derived with odd multiples of gamma so a child stream never
/// replays its parent's counter sequence. All randomness in this project is
/// reached through derive() chains from one user seed, which is what makes
/// parallel and serial schedules produce identical output.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  /// The SplitMix64 finalizer, a bijection on 64-bit words.
  static std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Seed of substream `index` under parent `key`.
  static std::uint64_t derive(std::uint64_t key, std::uint64_t index) noexcept {
    return mix(key + (2 * index + 1) * gamma);
  }

  std::uint64_t next() noexcept { return mix(state_ += gamma); }

  /// Uniform on [0, 1) with 53-bit resolution.
  double next_double() noexcept { return double(next() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1]; safe as a log() argument.
  double next_double_open() noexcept { return double((next() >> 11) + 1) * 0x1.0p-53; }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * next_double(); }

  /// Standard normal via Box-Muller; consumes exactly two draws per call.
  double normal() noexcept {
    const double u1 = next_double_open();
    const double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  double normal(double mean, double sd) noexcept { return mean + sd * normal(); }

 private:
  static constexpr std::uint64_t gamma = 0x9e3779b97f4a7c15ULL;
  std::uint64_t state_;
};

}  // namespace kkb
