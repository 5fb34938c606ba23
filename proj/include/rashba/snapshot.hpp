#pragma once

// Field snapshots: a short text header followed by a row-major payload,
// either raw little-endian doubles or CSV with shortest round-trip decimals.
// Both payloads reproduce the written doubles bit for bit.
//
//   rashba-snapshot 1
//   field n0
//   shape 32 32
//   grid Lx1 Lx2 Nx1 Nx2 pmax Np1 Np2 dt
//   time 0.5
//   format csv
//   end
//   <payload>

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "rashba/array.hpp"
#include "rashba/grid.hpp"

namespace rashba {

enum class SnapshotFormat { csv, binary };

inline std::string format_name(SnapshotFormat f) { return f == SnapshotFormat::csv ? "csv" : "binary"; }

inline SnapshotFormat parse_format(const std::string& s) {
  if (s == "csv") return SnapshotFormat::csv;
  if (s == "binary") return SnapshotFormat::binary;
  throw std::invalid_argument("unknown snapshot format '" + s + "' (expected csv or binary)");
}

/// Shortest decimal that parses back to the same double.
inline std::string to_text(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

inline double parse_double(std::string_view s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end) {
    throw std::invalid_argument("not a number: '" + std::string(s) + "'");
  }
  return v;
}

struct Snapshot {
  std::string field;
  std::vector<std::size_t> shape;
  GridSpec grid;
  double t = 0.0;
  std::vector<double> values;

  friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

template <std::size_t R>
Snapshot make_snapshot(std::string field, const GridArray<double, R>& a, const GridSpec& grid, double t) {
  return {std::move(field), {a.shape().begin(), a.shape().end()}, grid, t, {a.begin(), a.end()}};
}

inline void write_snapshot(std::ostream& os, const Snapshot& s, SnapshotFormat format) {
  std::size_t count = 1;
  for (auto e : s.shape) count *= e;
  if (count != s.values.size()) throw std::invalid_argument("snapshot: shape does not match value count");
  os << "rashba-snapshot 1\n";
  os << "field " << s.field << '\n';
  os << "shape";
  for (auto e : s.shape) os << ' ' << e;
  os << '\n';
  const auto& g = s.grid;
  os << "grid " << to_text(g.Lx1) << ' ' << to_text(g.Lx2) << ' ' << g.Nx1 << ' ' << g.Nx2 << ' '
     << to_text(g.pmax) << ' ' << g.Np1 << ' ' << g.Np2 << ' ' << to_text(g.dt) << '\n';
  os << "time " << to_text(s.t) << '\n';
  os << "format " << format_name(format) << '\n';
  os << "end\n";
  if (format == SnapshotFormat::binary) {
    static_assert(std::endian::native == std::endian::little, "binary snapshots assume little endian");
    os.write(reinterpret_cast<const char*>(s.values.data()),
             static_cast<std::streamsize>(s.values.size() * sizeof(double)));
  } else {
    const std::size_t row = s.shape.empty() ? 1 : s.shape.back();
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      os << to_text(s.values[i]) << ((i + 1) % row == 0 ? '\n' : ',');
    }
  }
  if (!os) throw std::runtime_error("snapshot: write failed");
}

namespace detail {

inline std::string expect_line(std::istream& is, const std::string& key) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("snapshot: truncated header, expected '" + key + "'");
  if (line.rfind(key, 0) != 0) {
    throw std::runtime_error("snapshot: expected '" + key + "', got '" + line + "'");
  }
  return line.size() > key.size() ? line.substr(key.size() + 1) : std::string{};
}

}  // namespace detail

inline Snapshot read_snapshot(std::istream& is) {
  Snapshot s;
  if (detail::expect_line(is, "rashba-snapshot") != "1") throw std::runtime_error("snapshot: unsupported version");
  s.field = detail::expect_line(is, "field");
  {
    std::istringstream ss(detail::expect_line(is, "shape"));
    std::size_t e;
    while (ss >> e) s.shape.push_back(e);
  }
  {
    std::istringstream ss(detail::expect_line(is, "grid"));
    std::string l1, l2, pm, dt;
    ss >> l1 >> l2 >> s.grid.Nx1 >> s.grid.Nx2 >> pm >> s.grid.Np1 >> s.grid.Np2 >> dt;
    if (!ss) throw std::runtime_error("snapshot: malformed grid line");
    s.grid.Lx1 = parse_double(l1);
    s.grid.Lx2 = parse_double(l2);
    s.grid.pmax = parse_double(pm);
    s.grid.dt = parse_double(dt);
  }
  s.t = parse_double(detail::expect_line(is, "time"));
  const SnapshotFormat format = parse_format(detail::expect_line(is, "format"));
  detail::expect_line(is, "end");
  std::size_t count = 1;
  for (auto e : s.shape) count *= e;
  s.values.resize(count);
  if (format == SnapshotFormat::binary) {
    is.read(reinterpret_cast<char*>(s.values.data()), static_cast<std::streamsize>(count * sizeof(double)));
    if (!is) throw std::runtime_error("snapshot: truncated binary payload");
  } else {
    std::size_t i = 0;
    std::string line;
    while (i < count && std::getline(is, line)) {
      std::size_t start = 0;
      while (start <= line.size() && i < count) {
        const auto comma = line.find(',', start);
        const auto stop = comma == std::string::npos ? line.size() : comma;
        s.values[i++] = parse_double(std::string_view(line).substr(start, stop - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
    }
    if (i != count) throw std::runtime_error("snapshot: truncated csv payload");
  }
  return s;
}

/// Writes n0..n3 as four consecutive snapshot records.
inline void write_density_snapshot(const std::string& path, const SpinDensityField& n, const GridSpec& grid,
                                   double t, SnapshotFormat format) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  for (int k = 0; k < 4; ++k) write_snapshot(os, make_snapshot("n" + std::to_string(k), n[k], grid, t), format);
}

inline std::vector<Snapshot> read_snapshots(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open '" + path + "'");
  std::vector<Snapshot> out;
  while (is.peek() != std::char_traits<char>::eof()) out.push_back(read_snapshot(is));
  return out;
}

}  // namespace rashba
