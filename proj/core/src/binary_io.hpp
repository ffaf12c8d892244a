// SPDX-License-Identifier: Apache-2.0
// Little-endian primitive encoding shared by the index and descriptor files.
#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <span>
#include <string>

#include "nohis/error.hpp"

namespace nohis::io {

template <typename UInt>
void put_uint(std::ostream& out, UInt value) {
  std::array<char, sizeof(UInt)> bytes{};
  for (std::size_t i = 0; i < sizeof(UInt); ++i) {
    bytes[i] = static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xffu);
  }
  out.write(bytes.data(), bytes.size());
}

inline void put_f64(std::ostream& out, double value) { put_uint(out, std::bit_cast<std::uint64_t>(value)); }

inline void put_f64s(std::ostream& out, std::span<const double> values) {
  for (double v : values) put_f64(out, v);
}

inline void read_exact(std::istream& in, char* dst, std::size_t n, const char* what) {
  in.read(dst, static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) {
    throw Error(Errc::truncated, std::string("truncated stream while reading ") + what);
  }
}

template <typename UInt>
UInt get_uint(std::istream& in, const char* what) {
  std::array<unsigned char, sizeof(UInt)> bytes{};
  read_exact(in, reinterpret_cast<char*>(bytes.data()), bytes.size(), what);
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(UInt); ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return static_cast<UInt>(v);
}

inline double get_f64(std::istream& in, const char* what) {
  return std::bit_cast<double>(get_uint<std::uint64_t>(in, what));
}

inline void get_f64s(std::istream& in, std::span<double> values, const char* what) {
  for (double& v : values) v = get_f64(in, what);
}

inline void expect_magic(std::istream& in, const char (&magic)[5]) {
  char got[4]{};
  in.read(got, 4);
  if (in.gcount() == 0) throw Error(Errc::truncated, "truncated stream: empty input");
  if (in.gcount() != 4 || std::memcmp(got, magic, 4) != 0) throw Error(Errc::bad_magic, "bad magic");
}

}  // namespace nohis::io
