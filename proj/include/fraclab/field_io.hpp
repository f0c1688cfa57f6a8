#pragma once

#include <filesystem>

#include "fraclab/spectral.hpp"

namespace fraclab {

// Binary layout, all little-endian:
//   8 bytes  magic "FRACFLD\0"
//   u32      version
//   u32      n, u32 N
//   f64      L, s, lambda
//   f64 x N^n samples, row-major with the first axis slowest
struct FieldFileHeader {
  std::uint32_t version = 1;
  std::uint32_t n = 0;
  std::uint32_t points_per_dim = 0;
  double box_length = 0.0;
  double s = 0.0;
  double lambda = 0.0;
};

struct FieldFile {
  FieldFileHeader header;
  Field field;
};

inline constexpr std::uint32_t field_file_version = 1;

void write_field(const std::filesystem::path& path, const Field& u, const Params& params);
FieldFile read_field(const std::filesystem::path& path);

}  // namespace fraclab
