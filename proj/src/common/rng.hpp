#pragma once

#include <cstdint>
#include <random>

namespace rlb {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of the generator that draws path `index` of a batch.
///
/// Paths are independent of how they are split across workers: path i always
/// uses mt19937_64 seeded with splitmix64(root + i * 0x9E3779B97F4A7C15).
inline std::uint64_t path_seed(std::uint64_t root, std::uint64_t index) noexcept {
  return splitmix64(root + index * 0x9E3779B97F4A7C15ULL);
}

/// Uniform draw in (0, 1]. Uses the top 53 bits so results do not depend on
/// the standard library's distribution implementation.
inline double uniform_open_closed(Rng& rng) {
  return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
}

}  // namespace rlb
