#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "tatlab/errors.hpp"
#include "tatlab/grid.hpp"

// Binary grid format, little-endian:
//   "TATG" | u32 version (=1) | u32 nx | u32 ny | f64 h | f64 origin_x | f64 origin_y
//   followed by nx*ny f64 values, row-major with x fastest.

namespace tat {

inline constexpr std::array<char, 4> kGridMagic{'T', 'A', 'T', 'G'};
inline constexpr std::uint32_t kGridVersion = 1;
inline constexpr std::size_t kGridHeaderBytes = 40;

struct GridHeader {
  std::uint32_t nx = 0;
  std::uint32_t ny = 0;
  double h = 0.0;
  Vec2 origin;
};

namespace detail {

template <class T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  }
}

template <class T>
void put(std::ostream& out, T v) {
  const auto le = to_little(v);
  out.write(reinterpret_cast<const char*>(&le), sizeof(T));
}

template <class T>
T get(std::istream& in, std::size_t& offset, const char* what) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (in.gcount() != std::streamsize(sizeof(T)))
    throw FormatError(offset + std::size_t(in.gcount()), std::string("truncated ") + what);
  offset += sizeof(T);
  return to_little(v);
}

}  // namespace detail

inline void write_grid(const GridField& f, std::ostream& out) {
  out.write(kGridMagic.data(), 4);
  detail::put<std::uint32_t>(out, kGridVersion);
  detail::put<std::uint32_t>(out, std::uint32_t(f.nx));
  detail::put<std::uint32_t>(out, std::uint32_t(f.ny));
  detail::put<double>(out, f.h);
  detail::put<double>(out, f.origin.x);
  detail::put<double>(out, f.origin.y);
  for (double v : f.values) detail::put<double>(out, v);
}

inline GridHeader read_grid_header(std::istream& in) {
  std::size_t offset = 0;
  std::array<char, 4> magic{};
  in.read(magic.data(), 4);
  if (in.gcount() != 4) throw FormatError(std::size_t(in.gcount()), "truncated magic");
  if (magic != kGridMagic) throw FormatError(0, "bad magic (expected TATG)");
  offset = 4;
  const auto version = detail::get<std::uint32_t>(in, offset, "version");
  if (version != kGridVersion)
    throw FormatError(4, "unsupported version " + std::to_string(version));
  GridHeader hdr;
  hdr.nx = detail::get<std::uint32_t>(in, offset, "nx");
  hdr.ny = detail::get<std::uint32_t>(in, offset, "ny");
  hdr.h = detail::get<double>(in, offset, "h");
  hdr.origin.x = detail::get<double>(in, offset, "origin_x");
  hdr.origin.y = detail::get<double>(in, offset, "origin_y");
  if (hdr.nx == 0 || hdr.ny == 0) throw FormatError(8, "empty grid");
  if (!(hdr.h > 0.0) || !std::isfinite(hdr.h)) throw FormatError(16, "grid spacing must be positive");
  return hdr;
}

inline GridField read_grid(std::istream& in) {
  const GridHeader hdr = read_grid_header(in);
  GridField f(hdr.nx, hdr.ny, hdr.h, hdr.origin);
  std::size_t offset = kGridHeaderBytes;
  for (double& v : f.values) v = detail::get<double>(in, offset, "values");
  return f;
}

inline void write_grid(const GridField& f, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  write_grid(f, out);
  if (!out) throw Error("failed writing '" + path + "'");
}

inline GridField read_grid(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  return read_grid(in);
}

/// Reads only the header, leaving the values on disk.
inline GridHeader read_grid_header(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  return read_grid_header(in);
}

}  // namespace tat
