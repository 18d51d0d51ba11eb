#pragma once

#include <cstdint>

namespace mcss::rng {

// Counter-based generator: every variate is a pure function of
// (seed, stream, counter), so parallel schedules cannot change results.
inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t keyed(std::uint64_t seed, std::uint64_t stream,
                                     std::uint64_t counter) {
  return splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ counter);
}

/// Uniform double in [0, 1) from 64 random bits (53-bit mantissa).
inline constexpr double to_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

inline constexpr double uniform01(std::uint64_t seed, std::uint64_t stream,
                                  std::uint64_t counter) {
  return to_unit(keyed(seed, stream, counter));
}

}  // namespace mcss::rng
