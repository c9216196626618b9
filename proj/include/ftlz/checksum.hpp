#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

namespace ftlz {

/// Integer checksum pair over the 32-bit word view of a block.
///   sum  = sum of w[i]      (mod 2^64)
///   isum = sum of i * w[i]  (mod 2^64)
/// A single corrupted word j with delta d changes the pair by (d, j*d), which
/// is enough to find and undo it.
struct ChecksumPair {
  std::uint64_t sum = 0;
  std::uint64_t isum = 0;

  friend bool operator==(const ChecksumPair&, const ChecksumPair&) = default;
};

/// Word limit per checksummed block; keeps the localization scan unique.
inline constexpr std::size_t kMaxChecksumWords = std::size_t{1} << 20;

inline std::uint32_t word_of(float v) { return std::bit_cast<std::uint32_t>(v); }
inline float float_of(std::uint32_t w) { return std::bit_cast<float>(w); }

ChecksumPair checksum_words(std::span<const std::uint32_t> words);
ChecksumPair checksum_block(std::span<const float> values);
/// Each double contributes its low word at index 2i and its high word at 2i+1.
ChecksumPair checksum_block_f64(std::span<const double> values);

/// Plain word sum; this is what the decompressed-data check stores per block.
std::uint64_t word_sum(std::span<const float> values);

enum class Integrity { clean, corrupted };

Integrity verify_block(std::span<const std::uint32_t> words, const ChecksumPair& stored);
Integrity verify_block(std::span<const float> values, const ChecksumPair& stored);
Integrity verify_block(std::span<const double> values, const ChecksumPair& stored);

enum class CorrectionStatus { clean, corrected, uncorrectable };

struct CorrectionOutcome {
  CorrectionStatus status = CorrectionStatus::clean;
  std::optional<std::size_t> index;  // word index
  std::optional<std::uint32_t> old_word;
  std::optional<std::uint32_t> new_word;
};

/// Word index j in [0, n) with j * delta_sum == delta_isum (mod 2^64), if
/// exactly one exists.
std::optional<std::size_t> locate_corruption(std::uint64_t delta_sum, std::uint64_t delta_isum, std::size_t n);

/// Detects, locates and repairs a single corrupted word in place.
CorrectionOutcome locate_and_correct(std::span<std::uint32_t> words, const ChecksumPair& stored);
CorrectionOutcome locate_and_correct(std::span<float> values, const ChecksumPair& stored);
CorrectionOutcome locate_and_correct(std::span<double> values, const ChecksumPair& stored);

}  // namespace ftlz
