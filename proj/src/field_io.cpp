#include "fraclab/field_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace fraclab {

namespace {

constexpr std::array<char, 8> magic{'F', 'R', 'A', 'C', 'F', 'L', 'D', '\0'};

template <class U>
void put_le(std::vector<char>& out, U bits) {
  for (std::size_t b = 0; b < sizeof(U); ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xff));
}

template <class U>
U get_le(const std::vector<char>& in, std::size_t& pos) {
  if (pos + sizeof(U) > in.size()) throw Error(ErrorCode::io_error, "truncated field file");
  U v = 0;
  for (std::size_t b = 0; b < sizeof(U); ++b)
    v |= static_cast<U>(static_cast<unsigned char>(in[pos + b])) << (8 * b);
  pos += sizeof(U);
  return v;
}

void put_f64(std::vector<char>& out, double v) { put_le(out, std::bit_cast<std::uint64_t>(v)); }
double get_f64(const std::vector<char>& in, std::size_t& pos) {
  return std::bit_cast<double>(get_le<std::uint64_t>(in, pos));
}

}  // namespace

void write_field(const std::filesystem::path& path, const Field& u, const Params& params) {
  const auto& g = u.grid();
  std::vector<char> buf(magic.begin(), magic.end());
  buf.reserve(64 + 8 * u.size());
  put_le<std::uint32_t>(buf, field_file_version);
  put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(g.n_dims()));
  put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(g.points_per_dim()));
  put_f64(buf, g.box_length());
  put_f64(buf, params.s);
  put_f64(buf, params.lambda);
  for (double v : u.values()) put_f64(buf, v);

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorCode::io_error, "cannot open " + path.string() + " for writing");
  os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!os) throw Error(ErrorCode::io_error, "write failed for " + path.string());
}

FieldFile read_field(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::io_error, "cannot open " + path.string());
  const std::vector<char> buf((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  if (buf.size() < magic.size() || !std::equal(magic.begin(), magic.end(), buf.begin()))
    throw Error(ErrorCode::io_error, path.string() + " is not a field file");
  std::size_t pos = magic.size();
  FieldFileHeader h;
  h.version = get_le<std::uint32_t>(buf, pos);
  if (h.version != field_file_version) throw Error(ErrorCode::io_error, "unsupported field file version");
  h.n = get_le<std::uint32_t>(buf, pos);
  h.points_per_dim = get_le<std::uint32_t>(buf, pos);
  h.box_length = get_f64(buf, pos);
  h.s = get_f64(buf, pos);
  h.lambda = get_f64(buf, pos);
  auto grid = make_grid(static_cast<int>(h.n), static_cast<int>(h.points_per_dim), h.box_length);
  if (buf.size() != pos + 8 * grid.size()) throw Error(ErrorCode::io_error, "field file payload has the wrong length");
  std::vector<double> values(grid.size());
  for (auto& v : values) v = get_f64(buf, pos);
  return FieldFile{h, Field(grid, std::move(values))};
}

}  // namespace fraclab
