#include "ftlz/quantize.hpp"

#include <cmath>

#include "ftlz/errors.hpp"

namespace ftlz {

std::optional<std::uint32_t> quantize_diff(double diff, double eb, const QuantConfig& cfg) {
  const double q = std::round(diff / (2.0 * eb));
  if (!std::isfinite(q)) return std::nullopt;
  const double bin = static_cast<double>(cfg.center()) + q;
  if (bin < 1.0 || bin > static_cast<double>(cfg.bin_capacity - 1)) return std::nullopt;
  return static_cast<std::uint32_t>(bin);
}

float reconstruct(float pred, std::uint32_t bin, double eb, const QuantConfig& cfg) {
  const double offset = static_cast<double>(static_cast<std::int64_t>(bin) - static_cast<std::int64_t>(cfg.center()));
  return static_cast<float>(static_cast<double>(pred) + 2.0 * eb * offset);
}

BoundCheck double_check(float ori, float dcmp, double eb) {
  const double err = std::abs(static_cast<double>(ori) - static_cast<double>(dcmp));
  return err <= eb ? BoundCheck::keep : BoundCheck::demote_to_unpredictable;
}

float UnpredictableReader::next() {
  if (pos_ >= words_.size()) throw CorruptStream("unpredictable store exhausted");
  return load_unpredictable(words_[pos_++]);
}

}  // namespace ftlz
