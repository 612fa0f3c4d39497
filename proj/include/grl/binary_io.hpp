#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "grl/common.hpp"

// Little-endian primitives shared by every binary cache format.
namespace grl::binio {

using Magic = std::array<char, 4>;

constexpr Magic make_magic(std::string_view s) { return {s[0], s[1], s[2], s[3]}; }

template <typename T>
T to_little(T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1) {
    std::array<unsigned char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
    std::memcpy(&v, bytes.data(), sizeof(T));
  }
  return v;
}

template <typename T>
void write(std::ostream& out, T v) {
  v = to_little(v);
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void write_array(std::ostream& out, std::span<const T> values) {
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(values.size_bytes()));
  } else {
    for (const T& v : values) write(out, v);
  }
}

void write_magic(std::ostream& out, const Magic& magic);

template <typename T>
T read(std::istream& in, const std::string& what) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw DataError("truncated binary file while reading " + what);
  return to_little(v);
}

template <typename T>
std::vector<T> read_array(std::istream& in, std::size_t count, const std::string& what) {
  std::vector<T> values(count);
  in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(count * sizeof(T)));
  if (!in) throw DataError("truncated binary file while reading " + what);
  if constexpr (std::endian::native == std::endian::big) {
    for (T& v : values) v = to_little(v);
  }
  return values;
}

/// Reads four bytes and throws unless they equal `expected`.
void expect_magic(std::istream& in, const Magic& expected, const std::string& path);

}  // namespace grl::binio
