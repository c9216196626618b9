#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ftlz {

struct Dims {
  std::size_t nx = 0, ny = 0, nz = 0;

  std::size_t volume() const { return nx * ny * nz; }
  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const { return (i * ny + j) * nz + k; }
  friend bool operator==(const Dims&, const Dims&) = default;
};

/// Dense row-major 3D field of 32-bit floats; `k` is the fastest varying axis.
class Field {
 public:
  Field() = default;
  Field(Dims dims, std::vector<float> values);
  explicit Field(Dims dims);

  const Dims& dims() const { return dims_; }
  std::size_t size() const { return values_.size(); }
  std::span<const float> values() const { return values_; }
  std::span<float> values() { return values_; }

  float at(std::size_t i, std::size_t j, std::size_t k) const { return values_[dims_.index(i, j, k)]; }
  float& at(std::size_t i, std::size_t j, std::size_t k) { return values_[dims_.index(i, j, k)]; }

  friend bool operator==(const Field&, const Field&) = default;

 private:
  Dims dims_;
  std::vector<float> values_;
};

using Extent = std::array<std::size_t, 3>;

struct BlockSpec {
  std::size_t block_index = 0;
  Extent origin{};
  Extent extent{};

  std::size_t volume() const { return extent[0] * extent[1] * extent[2]; }
  /// Canonical in-block offset of local coordinates.
  std::size_t offset(std::size_t i, std::size_t j, std::size_t k) const { return (i * extent[1] + j) * extent[2] + k; }
};

inline constexpr std::size_t kDefaultBlockEdge = 10;
inline constexpr std::size_t kMinBlockEdge = 2;
inline constexpr std::size_t kMaxBlockEdge = 64;

/// Row-major tiling of a field into independent blocks. Trailing blocks keep
/// their remainder extent; nothing is padded.
class BlockGrid {
 public:
  BlockGrid(Dims dims, std::size_t block_edge);

  const Dims& field_dims() const { return dims_; }
  std::size_t block_edge() const { return edge_; }
  const Extent& counts() const { return counts_; }
  std::size_t size() const { return blocks_.size(); }
  const BlockSpec& operator[](std::size_t b) const { return blocks_[b]; }
  const std::vector<BlockSpec>& blocks() const { return blocks_; }

  struct Location {
    std::size_t block = 0;
    std::size_t offset = 0;
  };
  Location locate(std::size_t i, std::size_t j, std::size_t k) const;
  std::array<std::size_t, 3> cell(std::size_t block, std::size_t offset) const;

 private:
  Dims dims_;
  std::size_t edge_;
  Extent counts_{};
  std::vector<BlockSpec> blocks_;
};

BlockGrid partition(Dims dims, std::size_t block_edge);

/// Copies one block out of the field in canonical order.
std::vector<float> gather_block(const Field& field, const BlockSpec& block);
void gather_block(const Field& field, const BlockSpec& block, std::span<float> out);
void scatter_block(std::span<const float> block_values, const BlockSpec& block, Field& field);

enum class BoundMode : std::uint8_t { absolute = 0, value_range_relative = 1 };

struct ErrorBound {
  BoundMode mode = BoundMode::absolute;
  double value = 0.0;

  static ErrorBound absolute(double v) { return {BoundMode::absolute, v}; }
  static ErrorBound relative(double v) { return {BoundMode::value_range_relative, v}; }
  friend bool operator==(const ErrorBound&, const ErrorBound&) = default;
};

/// Absolute bound for `field`; throws DegenerateBound when it is not positive.
double resolve_error_bound(const ErrorBound& bound, const Field& field);

struct ValueRange {
  float min = 0.0f;
  float max = 0.0f;
  double span() const { return static_cast<double>(max) - static_cast<double>(min); }
};
ValueRange value_range(std::span<const float> values);

enum class SynthKind { constant, linear, sine, noise, mixed };

Field synth_field(SynthKind kind, Dims dims, std::uint64_t seed);
SynthKind parse_synth_kind(const std::string& name);

struct QualityMetrics {
  double max_abs_error = 0.0;
  double rmse = 0.0;
  double psnr = 0.0;  // +infinity when rmse == 0
  double compression_ratio = 0.0;
  double bit_rate = 0.0;
};

QualityMetrics compute_metrics(const Field& original, const Field& decompressed, std::size_t compressed_bytes);

}  // namespace ftlz
