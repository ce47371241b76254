#pragma once

// MFE1 binary container:
//   bytes 0-3   ASCII "MFE1"
//   bytes 4-11  N, unsigned 64-bit little-endian
//   bytes 12-19 L, IEEE-754 binary64 little-endian
//   then N*N binary64 little-endian samples, row-major (first index = x1)

#include <filesystem>
#include <iosfwd>

#include "mfe/field.hpp"

namespace mfe {

void write_mfe1(std::ostream& out, const Field& f);
Field read_mfe1(std::istream& in);

void save_mfe1(const std::filesystem::path& path, const Field& f);
Field load_mfe1(const std::filesystem::path& path);

// Header `x1,x2,value`, one row per sample.
void write_field_csv(std::ostream& out, const Field& f);

}  // namespace mfe
