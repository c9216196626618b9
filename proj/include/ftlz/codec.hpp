#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace ftlz {

/// Lossless backend codecs, identified by the container's codec byte.
enum class CodecId : std::uint8_t {
  identity = 0,
  run_length = 1,
  deflate = 2,
};

bool codec_registered(std::uint8_t id);
std::string_view codec_name(std::uint8_t id);

std::vector<std::uint8_t> backend_apply(std::span<const std::uint8_t> bytes, std::uint8_t codec_id);
std::vector<std::uint8_t> backend_invert(std::span<const std::uint8_t> bytes, std::uint8_t codec_id);

}  // namespace ftlz
