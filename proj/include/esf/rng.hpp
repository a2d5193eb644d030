#pragma once

// Random stream contract: std::mt19937_64 (period 2^19937 - 1), seeded from a
// 64-bit value. Per-replicate and per-worker streams are derived with
// derive_seed(), a splitmix64 finaliser applied twice:
//
//   child = mix(mix(seed) + 0x9E3779B97F4A7C15 * (index + 1))
//
// The uniform helpers below avoid the implementation-defined std distributions
// so that integer and [0,1) draws are identical across standard libraries.

#include <cstdint>
#include <random>

namespace esf {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(seed) + 0x9E3779B97F4A7C15ULL * (index + 1));
}

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, bound), bound > 0 (Lemire's nearly-divisionless method).
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t bound) {
  unsigned __int128 m = static_cast<unsigned __int128>(rng()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(rng()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

}  // namespace esf
