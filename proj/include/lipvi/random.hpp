#pragma once

#include <cstdint>
#include <random>

namespace lipvi {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed for substream `index` of purpose `stream` under a user seed.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return mix64(mix64(mix64(seed) ^ stream) ^ index);
}

namespace streams {
inline constexpr std::uint64_t episode = 1;
inline constexpr std::uint64_t freeze = 2;
inline constexpr std::uint64_t subsample = 3;
inline constexpr std::uint64_t init_points = 4;
inline constexpr std::uint64_t rollout = 5;
inline constexpr std::uint64_t probes = 6;
inline constexpr std::uint64_t row_cap = 7;
}  // namespace streams

}  // namespace lipvi
