#pragma once

#include <cstdint>
#include <random>

namespace advsharp {

// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t counter) {
  return mix64(mix64(seed) ^ (counter + 0x632be59bd9b4e019ULL));
}

constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return stream_seed(stream_seed(seed, a), b);
}

// Engine for the (seed, counter) stream, e.g. one per sample so that the
// order in which samples are processed never changes the draws.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t counter) {
  return std::mt19937_64(stream_seed(seed, counter));
}

// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

}  // namespace advsharp
