#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ftlz/core.hpp"
#include "ftlz/huffman.hpp"
#include "ftlz/predict.hpp"

namespace ftlz {

inline constexpr std::array<char, 4> kMagic{'F', 'T', 'L', 'Z'};
inline constexpr std::uint8_t kFormatVersion = 1;

struct StreamHeader {
  std::uint8_t codec = 0;
  Dims dims;
  std::uint32_t block_edge = 10;
  ErrorBound bound;
  double eb_abs = 0.0;  // resolved absolute bound used by the quantizer
  std::uint32_t bin_capacity = 65536;
  std::uint64_t block_count = 0;

  friend bool operator==(const StreamHeader&, const StreamHeader&) = default;
};

/// One block-table entry. Coefficients are serialized only for regression
/// blocks.
struct BlockRecord {
  PredictorKind predictor = PredictorKind::lorenzo;
  RegressionCoeffs coeffs;
  std::uint32_t unpredictable_count = 0;
  std::uint32_t bit_length = 0;

  friend bool operator==(const BlockRecord& a, const BlockRecord& b) {
    return a.predictor == b.predictor && a.unpredictable_count == b.unpredictable_count &&
           a.bit_length == b.bit_length && (a.predictor == PredictorKind::lorenzo || a.coeffs == b.coeffs);
  }
};

/// Wire-level archive. Payload and checksum sections are held exactly as
/// stored, i.e. after the backend codec.
struct CompressedStream {
  StreamHeader header;
  std::vector<BlockRecord> blocks;
  std::vector<SymbolLength> codebook;
  std::vector<std::uint8_t> payload;
  std::vector<std::uint32_t> unpredictable;
  std::uint64_t sum_dc_raw_length = 0;  // 0 when decompressed-data checksums are not stored
  std::vector<std::uint8_t> sum_dc;

  bool has_sum_dc() const { return sum_dc_raw_length != 0; }

  friend bool operator==(const CompressedStream&, const CompressedStream&) = default;
};

std::vector<std::uint8_t> serialize(const CompressedStream& stream);
/// Throws CorruptStream (with the byte offset) on any malformed input.
CompressedStream parse(std::span<const std::uint8_t> bytes);

/// Byte offset and size of the stored payload inside a serialized archive.
struct SectionSpan {
  std::size_t offset = 0;
  std::size_t size = 0;
};
SectionSpan payload_section(std::span<const std::uint8_t> archive);

/// Per-block starting positions derived from the block table.
struct BlockOffsets {
  std::vector<std::uint64_t> bit_offset;
  std::vector<std::uint64_t> unpredictable_offset;
};
BlockOffsets block_offsets(const CompressedStream& stream);

std::vector<std::uint8_t> sum_dc_bytes(std::span<const std::uint64_t> sums);
std::vector<std::uint64_t> sum_dc_values(std::span<const std::uint8_t> raw, std::size_t block_count);

}  // namespace ftlz
