#pragma once

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "advdet/common.hpp"

namespace advdet {

// Little-endian scalar I/O. The toolkit's binary formats are defined on a
// little-endian byte order; this host is little-endian.

template <typename T>
void write_le(std::ostream& os, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_le(std::istream& is, const std::string& what) {
  T value{};
  is.read(reinterpret_cast<char*>(&value), sizeof(T));
  require(static_cast<bool>(is), ErrorCode::Format, "truncated file while reading " + what);
  return value;
}

inline void write_string(std::ostream& os, const std::string& s) {
  write_le<std::uint32_t>(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string read_string(std::istream& is, const std::string& what,
                               std::uint32_t max_len = 1u << 20) {
  const auto len = read_le<std::uint32_t>(is, what + " length");
  require(len <= max_len, ErrorCode::Format, what + " length implausibly large");
  std::string s(len, '\0');
  is.read(s.data(), len);
  require(static_cast<bool>(is), ErrorCode::Format, "truncated file while reading " + what);
  return s;
}

inline void write_f32_array(std::ostream& os, const float* data, std::size_t count) {
  os.write(reinterpret_cast<const char*>(data),
           static_cast<std::streamsize>(count * sizeof(float)));
}

inline void read_f32_array(std::istream& is, float* data, std::size_t count,
                           const std::string& what) {
  is.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(count * sizeof(float)));
  require(static_cast<bool>(is), ErrorCode::Format, "truncated file while reading " + what);
}

}  // namespace advdet
