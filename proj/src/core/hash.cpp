#include "advdet/core/hash.hpp"

#include <array>
#include <cstdio>
#include <fstream>

#include "advdet/common.hpp"

namespace advdet {

std::uint64_t fnv1a64_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::Io, "cannot open file for hashing: " + path);
  std::array<char, 1 << 16> buffer;
  std::uint64_t h = kFnvOffset;
  while (in) {
    in.read(buffer.data(), buffer.size());
    h = fnv1a64(buffer.data(), static_cast<std::size_t>(in.gcount()), h);
  }
  return h;
}

std::string to_hex(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
  return std::string(buf);
}

}  // namespace advdet
