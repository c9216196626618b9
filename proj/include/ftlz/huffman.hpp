#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace ftlz {

/// MSB-first bit accumulator.
class BitWriter {
 public:
  void put(std::uint64_t code, unsigned length);
  /// Appends every bit written to `other`.
  void append(const BitWriter& other);

  std::uint64_t bit_length() const { return bits_; }
  const std::vector<std::uint8_t>& bytes() const { return bytes_; }
  std::vector<std::uint8_t> take_bytes() { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
  std::uint64_t bits_ = 0;
};

/// Reads bits [begin, end) of a byte buffer, MSB-first.
class BitReader {
 public:
  BitReader(std::span<const std::uint8_t> data, std::uint64_t begin, std::uint64_t end);

  /// Returns 0/1, or -1 once the window is exhausted.
  int get() {
    if (pos_ >= end_) return -1;
    const int bit = (data_[pos_ >> 3] >> (7 - (pos_ & 7))) & 1;
    ++pos_;
    return bit;
  }
  std::uint64_t consumed() const { return pos_ - begin_; }

 private:
  std::span<const std::uint8_t> data_;
  std::uint64_t begin_, pos_, end_;
};

struct SymbolLength {
  std::uint32_t symbol = 0;
  std::uint8_t length = 0;

  friend bool operator==(const SymbolLength&, const SymbolLength&) = default;
};

/// Canonical Huffman code. Only code lengths are persisted; codes are
/// reassigned in (length, symbol) order.
class HuffmanCodebook {
 public:
  HuffmanCodebook() = default;

  /// `freq[s]` is the count of symbol s; zero-count symbols get no code.
  static HuffmanCodebook from_frequencies(std::span<const std::uint64_t> freq);
  static HuffmanCodebook from_lengths(std::vector<SymbolLength> lengths);

  /// Sorted by symbol.
  const std::vector<SymbolLength>& lengths() const { return lengths_; }
  std::size_t symbol_count() const { return lengths_.size(); }

  bool contains(std::uint32_t symbol) const;
  unsigned length_of(std::uint32_t symbol) const;
  std::uint64_t code_of(std::uint32_t symbol) const;

  /// One canonical decode step; returns false on an invalid or truncated code.
  bool decode_one(BitReader& in, std::uint32_t& symbol) const;

  static constexpr unsigned kMaxCodeLength = 64;

 private:
  void assign_codes();

  std::vector<SymbolLength> lengths_;
  // Encoder side: dense over [0, max_symbol].
  std::vector<std::uint64_t> codes_;
  std::vector<std::uint8_t> code_len_;
  // Decoder side, indexed by length.
  std::vector<std::uint64_t> first_code_;
  std::vector<std::uint32_t> first_index_;
  std::vector<std::uint32_t> count_;
  std::vector<std::uint32_t> sorted_symbols_;
  unsigned max_len_ = 0;
};

/// Appends the codes for `bins`; returns the number of bits written.
std::uint64_t encode_block(std::span<const std::uint32_t> bins, const HuffmanCodebook& book, BitWriter& out);

/// Decodes exactly `count` symbols from bits [bit_offset, bit_offset + bit_length).
/// The window must be consumed exactly.
std::vector<std::uint32_t> decode_block(std::span<const std::uint8_t> payload, std::uint64_t bit_offset,
                                        std::uint64_t bit_length, const HuffmanCodebook& book, std::size_t count);

}  // namespace ftlz
