#pragma once

#include <cstdint>
#include <random>

namespace advdet {

/// One named, 64-bit-seeded generator per pipeline stage. Derived seeds are
/// mixed with splitmix64 so that stage/index streams do not overlap for
/// nearby base seeds.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t salt) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline std::mt19937_64 make_rng(std::uint64_t base, std::uint64_t salt) {
  return std::mt19937_64(mix_seed(base, salt));
}

}  // namespace advdet
