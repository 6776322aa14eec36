#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hpclab/spectral/field.hpp"

namespace hpclab::spectral {

/// Named fields sharing one grid at one time instant.
struct Snapshot {
  double time = 0.0;
  std::vector<std::pair<std::string, SpectralField>> fields;

  const SpectralField& at(const std::string& name) const {
    for (const auto& [n, f] : fields) {
      if (n == name) return f;
    }
    throw std::out_of_range("snapshot has no field '" + name + "'");
  }
};

inline constexpr std::array<char, 8> kSnapshotMagic = {'H', 'P', 'C', 'S', 'N', 'A', 'P', '1'};

namespace detail {
template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
T take(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("snapshot file truncated");
  return v;
}
}  // namespace detail

/// Little-endian binary layout:
///   magic "HPCSNAP1" | int32 d | int32 N | float64 L | float64 time | int32 count
///   then per field: char[16] name (NUL padded) | int32 components |
///   components * N^d complex coefficients as (float64 re, float64 im),
///   component-major, row-major over the mode multi-index in FFT order.
inline void write_snapshot(const std::string& path, const Snapshot& snap) {
  static_assert(std::endian::native == std::endian::little, "snapshot format is little-endian");
  if (snap.fields.empty()) throw std::invalid_argument("snapshot has no fields");
  const Grid& g = snap.fields.front().second.grid();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os.write(kSnapshotMagic.data(), kSnapshotMagic.size());
  detail::put<std::int32_t>(os, g.dim());
  detail::put<std::int32_t>(os, g.points());
  detail::put<double>(os, g.length());
  detail::put<double>(os, snap.time);
  detail::put<std::int32_t>(os, static_cast<std::int32_t>(snap.fields.size()));
  for (const auto& [name, f] : snap.fields) {
    f.check_grid(snap.fields.front().second);
    if (name.size() > 15) throw std::invalid_argument("field name too long: " + name);
    char buf[16] = {};
    std::memcpy(buf, name.data(), name.size());
    os.write(buf, 16);
    detail::put<std::int32_t>(os, f.components());
    for (const auto& c : f.data()) {
      detail::put<double>(os, c.real());
      detail::put<double>(os, c.imag());
    }
  }
  if (!os) throw std::runtime_error("write failed: " + path);
}

inline Snapshot read_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::array<char, 8> magic{};
  is.read(magic.data(), magic.size());
  if (!is || magic != kSnapshotMagic) throw std::runtime_error(path + " is not a snapshot file");
  const int d = detail::take<std::int32_t>(is);
  const int n = detail::take<std::int32_t>(is);
  const double length = detail::take<double>(is);
  Snapshot snap;
  snap.time = detail::take<double>(is);
  const int count = detail::take<std::int32_t>(is);
  const Grid g(d, n, length);
  for (int k = 0; k < count; ++k) {
    char buf[17] = {};
    is.read(buf, 16);
    const int comps = detail::take<std::int32_t>(is);
    SpectralField f(g, comps);
    for (auto& c : f.data()) {
      const double re = detail::take<double>(is);
      const double im = detail::take<double>(is);
      c = {re, im};
    }
    snap.fields.emplace_back(std::string(buf), std::move(f));
  }
  return snap;
}

}  // namespace hpclab::spectral
