#pragma once

#include <cstdint>

namespace gluenn {

// Counter-based deterministic RNG: value i is a pure function of (seed, i),
// so parameter initialization is reproducible across platforms and does not
// depend on call order.
inline std::uint64_t hash_counter(std::uint64_t seed, std::uint64_t counter) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (counter + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Uniform in [0, 1).
inline double uniform01(std::uint64_t seed, std::uint64_t counter) {
  return static_cast<double>(hash_counter(seed, counter) >> 11) * 0x1.0p-53;
}

// Uniform in [-limit, limit).
inline double uniform_sym(std::uint64_t seed, std::uint64_t counter, double limit) {
  return (2.0 * uniform01(seed, counter) - 1.0) * limit;
}

}  // namespace gluenn
