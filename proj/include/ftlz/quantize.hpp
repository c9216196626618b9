#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

#include "ftlz/checksum.hpp"

namespace ftlz {

/// Bin 0 marks an unpredictable point; predictable bins are [1, capacity).
struct QuantConfig {
  std::uint32_t bin_capacity = 65536;

  std::uint32_t center() const { return bin_capacity / 2; }
  bool valid() const { return bin_capacity >= 4 && (bin_capacity & (bin_capacity - 1)) == 0; }
};

inline constexpr std::uint32_t kUnpredictableBin = 0;

/// center + round(diff / 2eb), half away from zero; nullopt when the result
/// leaves [1, capacity).
std::optional<std::uint32_t> quantize_diff(double diff, double eb, const QuantConfig& cfg);

/// pred + 2eb * (bin - center), rounded once to float.
float reconstruct(float pred, std::uint32_t bin, double eb, const QuantConfig& cfg);

inline std::uint32_t store_unpredictable(float v) { return word_of(v); }
inline float load_unpredictable(std::uint32_t w) { return float_of(w); }

enum class BoundCheck { keep, demote_to_unpredictable };

BoundCheck double_check(float ori, float dcmp, double eb);

/// Sequential reader over one block's unpredictable words.
class UnpredictableReader {
 public:
  explicit UnpredictableReader(std::span<const std::uint32_t> words) : words_(words) {}

  float next();
  std::size_t consumed() const { return pos_; }
  bool exhausted() const { return pos_ == words_.size(); }

 private:
  std::span<const std::uint32_t> words_;
  std::size_t pos_ = 0;
};

}  // namespace ftlz
