#pragma once

#include <cstdint>
#include <string>

namespace advdet {

inline constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
inline constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

inline std::uint64_t fnv1a64(const void* data, std::size_t size,
                             std::uint64_t seed = kFnvOffset) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= kFnvPrime;
  }
  return h;
}

inline std::uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

/// Content hash of a file; used for artifact integrity checks (corruption
/// detection, not cryptography).
std::uint64_t fnv1a64_file(const std::string& path);

std::string to_hex(std::uint64_t value);

}  // namespace advdet
