#include "mfe/field_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "mfe/errors.hpp"
#include "mfe/text.hpp"

namespace mfe {
namespace {

constexpr char kMagic[4] = {'M', 'F', 'E', '1'};

std::uint64_t to_little(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
    return r;
  }
  return v;
}

void put_u64(std::ostream& out, std::uint64_t v) {
  v = to_little(v);
  out.write(reinterpret_cast<const char*>(&v), 8);
}

void put_f64(std::ostream& out, double d) { put_u64(out, std::bit_cast<std::uint64_t>(d)); }

std::uint64_t get_u64(std::istream& in) {
  std::uint64_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), 8)) throw IoError("MFE1: truncated stream");
  return to_little(v);
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

}  // namespace

void write_mfe1(std::ostream& out, const Field& f) {
  out.write(kMagic, 4);
  put_u64(out, static_cast<std::uint64_t>(f.grid().resolution()));
  put_f64(out, f.grid().side_length());
  for (double v : f.values()) put_f64(out, v);
  if (!out) throw IoError("MFE1: write failed");
}

Field read_mfe1(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) throw IoError("MFE1: bad magic");
  const std::uint64_t n = get_u64(in);
  const double side = get_f64(in);
  if (n > (1u << 15)) throw IoError("MFE1: implausible resolution");
  TorusGrid grid(side, static_cast<int>(n));
  std::vector<double> values(grid.size());
  for (double& v : values) v = get_f64(in);
  return Field(grid, std::move(values));
}

void save_mfe1(const std::filesystem::path& path, const Field& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_mfe1(out, f);
}

Field load_mfe1(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_mfe1(in);
}

void write_field_csv(std::ostream& out, const Field& f) {
  const auto& grid = f.grid();
  out << "x1,x2,value\r\n";
  for (int i = 0; i < grid.resolution(); ++i) {
    for (int j = 0; j < grid.resolution(); ++j) {
      out << format_real(grid.coordinate(i)) << ',' << format_real(grid.coordinate(j)) << ','
          << format_real(f(i, j)) << "\r\n";
    }
  }
}

}  // namespace mfe
