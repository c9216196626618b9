#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ftlz/core.hpp"

namespace ftlz {

/// Headerless little-endian float32, row-major; dims come from the caller.
Field read_raw_field(const std::string& path, Dims dims);
void write_raw_field(const std::string& path, const Field& field);

std::vector<std::uint8_t> read_bytes(const std::string& path);
void write_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes);

}  // namespace ftlz
