#include "ftlz/raw_io.hpp"

#include <bit>
#include <fstream>
#include <iterator>

#include "ftlz/errors.hpp"

namespace ftlz {

std::vector<std::uint8_t> read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path);
}

Field read_raw_field(const std::string& path, Dims dims) {
  if (dims.nx == 0 || dims.ny == 0 || dims.nz == 0) throw InvalidGeometry("field dimensions must be positive");
  const auto bytes = read_bytes(path);
  if (bytes.size() != dims.volume() * 4)
    throw ShapeMismatch(path + " holds " + std::to_string(bytes.size()) + " bytes, expected " +
                        std::to_string(dims.volume() * 4) + " for the given dims");
  std::vector<float> values(dims.volume());
  for (std::size_t n = 0; n < values.size(); ++n) {
    const std::uint32_t w = static_cast<std::uint32_t>(bytes[4 * n]) | static_cast<std::uint32_t>(bytes[4 * n + 1]) << 8 |
                            static_cast<std::uint32_t>(bytes[4 * n + 2]) << 16 |
                            static_cast<std::uint32_t>(bytes[4 * n + 3]) << 24;
    values[n] = std::bit_cast<float>(w);
  }
  return Field(dims, std::move(values));
}

void write_raw_field(const std::string& path, const Field& field) {
  std::vector<std::uint8_t> bytes(field.size() * 4);
  const auto v = field.values();
  for (std::size_t n = 0; n < v.size(); ++n) {
    const auto w = std::bit_cast<std::uint32_t>(v[n]);
    for (int b = 0; b < 4; ++b) bytes[4 * n + b] = static_cast<std::uint8_t>(w >> (8 * b));
  }
  write_bytes(path, bytes);
}

}  // namespace ftlz
