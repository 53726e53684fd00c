#pragma once

#include <cstdint>
#include <random>

namespace fqr {

/// splitmix64 finalizer; used to derive independent seed streams.
inline std::uint64_t mixSeed(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mixSeed(std::uint64_t a, std::uint64_t b) {
  return mixSeed(mixSeed(a) ^ (0x9e3779b97f4a7c15ULL + b));
}

inline std::uint64_t mixSeed(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return mixSeed(mixSeed(a, b), c);
}

using RngEngine = std::mt19937_64;

}  // namespace fqr
