#include "ftlz/core.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "ftlz/errors.hpp"

namespace ftlz {

Field::Field(Dims dims, std::vector<float> values) : dims_(dims), values_(std::move(values)) {
  if (dims.nx == 0 || dims.ny == 0 || dims.nz == 0) throw InvalidGeometry("field dimensions must be positive");
  if (values_.size() != dims.volume()) throw ShapeMismatch("value count does not match dimensions");
}

Field::Field(Dims dims) : Field(dims, std::vector<float>(dims.volume(), 0.0f)) {}

namespace {

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

}  // namespace

BlockGrid::BlockGrid(Dims dims, std::size_t block_edge) : dims_(dims), edge_(block_edge) {
  if (dims.nx == 0 || dims.ny == 0 || dims.nz == 0) throw InvalidGeometry("field dimensions must be positive");
  if (block_edge < kMinBlockEdge || block_edge > kMaxBlockEdge)
    throw InvalidGeometry("block edge must lie in [2, 64], got " + std::to_string(block_edge));

  const Extent full{dims.nx, dims.ny, dims.nz};
  for (int a = 0; a < 3; ++a) counts_[a] = ceil_div(full[a], edge_);

  blocks_.reserve(counts_[0] * counts_[1] * counts_[2]);
  for (std::size_t bi = 0; bi < counts_[0]; ++bi)
    for (std::size_t bj = 0; bj < counts_[1]; ++bj)
      for (std::size_t bk = 0; bk < counts_[2]; ++bk) {
        BlockSpec spec;
        spec.block_index = blocks_.size();
        const Extent coord{bi, bj, bk};
        for (int a = 0; a < 3; ++a) {
          spec.origin[a] = coord[a] * edge_;
          spec.extent[a] = std::min(edge_, full[a] - spec.origin[a]);
        }
        blocks_.push_back(spec);
      }
}

BlockGrid::Location BlockGrid::locate(std::size_t i, std::size_t j, std::size_t k) const {
  const std::size_t bi = i / edge_, bj = j / edge_, bk = k / edge_;
  const std::size_t b = (bi * counts_[1] + bj) * counts_[2] + bk;
  const BlockSpec& spec = blocks_[b];
  return {b, spec.offset(i - spec.origin[0], j - spec.origin[1], k - spec.origin[2])};
}

std::array<std::size_t, 3> BlockGrid::cell(std::size_t block, std::size_t offset) const {
  const BlockSpec& spec = blocks_[block];
  const std::size_t plane = spec.extent[1] * spec.extent[2];
  const std::size_t li = offset / plane;
  const std::size_t lj = (offset % plane) / spec.extent[2];
  const std::size_t lk = offset % spec.extent[2];
  return {spec.origin[0] + li, spec.origin[1] + lj, spec.origin[2] + lk};
}

BlockGrid partition(Dims dims, std::size_t block_edge) { return BlockGrid(dims, block_edge); }

void gather_block(const Field& field, const BlockSpec& block, std::span<float> out) {
  const Dims& d = field.dims();
  const auto values = field.values();
  std::size_t n = 0;
  for (std::size_t i = 0; i < block.extent[0]; ++i)
    for (std::size_t j = 0; j < block.extent[1]; ++j) {
      const std::size_t row = d.index(block.origin[0] + i, block.origin[1] + j, block.origin[2]);
      std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(row), block.extent[2], out.begin() + static_cast<std::ptrdiff_t>(n));
      n += block.extent[2];
    }
}

std::vector<float> gather_block(const Field& field, const BlockSpec& block) {
  std::vector<float> out(block.volume());
  gather_block(field, block, out);
  return out;
}

void scatter_block(std::span<const float> block_values, const BlockSpec& block, Field& field) {
  const Dims& d = field.dims();
  auto values = field.values();
  std::size_t n = 0;
  for (std::size_t i = 0; i < block.extent[0]; ++i)
    for (std::size_t j = 0; j < block.extent[1]; ++j) {
      const std::size_t row = d.index(block.origin[0] + i, block.origin[1] + j, block.origin[2]);
      std::copy_n(block_values.begin() + static_cast<std::ptrdiff_t>(n), block.extent[2], values.begin() + static_cast<std::ptrdiff_t>(row));
      n += block.extent[2];
    }
}

ValueRange value_range(std::span<const float> values) {
  ValueRange r{std::numeric_limits<float>::infinity(), -std::numeric_limits<float>::infinity()};
  bool any = false;
  for (float v : values) {
    if (std::isnan(v)) continue;
    r.min = std::min(r.min, v);
    r.max = std::max(r.max, v);
    any = true;
  }
  if (!any) return {};
  return r;
}

double resolve_error_bound(const ErrorBound& bound, const Field& field) {
  if (field.size() == 0) throw InvalidArgument("cannot resolve an error bound on an empty field");
  if (!(bound.value >= 0.0) || !std::isfinite(bound.value)) throw InvalidArgument("error bound must be finite and nonnegative");
  double resolved = bound.value;
  if (bound.mode == BoundMode::value_range_relative) resolved = bound.value * value_range(field.values()).span();
  if (!(resolved > 0.0) || !std::isfinite(resolved)) throw DegenerateBound("resolved error bound is not positive");
  return resolved;
}

namespace {

// Uniform in [-1, 1) from the top 24 bits of a 64-bit draw; mt19937_64 output is
// fully specified, unlike the standard distributions.
float unit_noise(std::mt19937_64& rng) {
  const auto bits = static_cast<std::uint32_t>(rng() >> 40);
  return static_cast<float>(bits) * 0x1p-23f - 1.0f;
}

float sine_value(std::size_t i, std::size_t j, std::size_t k, const Dims& d, double phase) {
  const double tau = 2.0 * std::numbers::pi;
  const double x = static_cast<double>(i) / static_cast<double>(d.nx);
  const double y = static_cast<double>(j) / static_cast<double>(d.ny);
  const double z = static_cast<double>(k) / static_cast<double>(d.nz);
  const double v = std::sin(tau * x + phase) * std::cos(tau * 2.0 * y) + 0.5 * std::sin(tau * (z + 0.5 * x) + 0.3 * phase) +
                   0.25 * std::cos(tau * 3.0 * (x + y + z));
  return static_cast<float>(v);
}

}  // namespace

Field synth_field(SynthKind kind, Dims dims, std::uint64_t seed) {
  Field f(dims);
  std::mt19937_64 rng(seed);
  const double phase = static_cast<double>(seed % 1024) / 1024.0;
  for (std::size_t i = 0; i < dims.nx; ++i)
    for (std::size_t j = 0; j < dims.ny; ++j)
      for (std::size_t k = 0; k < dims.nz; ++k) {
        float v = 0.0f;
        switch (kind) {
          case SynthKind::constant:
            v = 1.5f;
            break;
          case SynthKind::linear:
            // Dyadic coefficients keep the affine values exact in float.
            v = 0.5f + 0.25f * static_cast<float>(i) + 0.5f * static_cast<float>(j) - 0.125f * static_cast<float>(k);
            break;
          case SynthKind::sine:
            v = sine_value(i, j, k, dims, phase);
            break;
          case SynthKind::noise:
            v = unit_noise(rng);
            break;
          case SynthKind::mixed:
            v = sine_value(i, j, k, dims, phase) + 0.01f * unit_noise(rng) +
                0.002f * static_cast<float>(i + 2 * j) - 0.001f * static_cast<float>(k);
            break;
        }
        f.at(i, j, k) = v;
      }
  return f;
}

SynthKind parse_synth_kind(const std::string& name) {
  if (name == "constant") return SynthKind::constant;
  if (name == "linear") return SynthKind::linear;
  if (name == "sine") return SynthKind::sine;
  if (name == "noise") return SynthKind::noise;
  if (name == "mixed") return SynthKind::mixed;
  throw InvalidArgument("unknown synthetic field kind: " + name);
}

QualityMetrics compute_metrics(const Field& original, const Field& decompressed, std::size_t compressed_bytes) {
  if (original.dims() != decompressed.dims()) throw ShapeMismatch("metric inputs differ in shape");
  const auto a = original.values();
  const auto b = decompressed.values();
  QualityMetrics m;
  double sq = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) {
    // Bit-identical values (NaN payloads included) carry no error.
    const double e = std::bit_cast<std::uint32_t>(a[n]) == std::bit_cast<std::uint32_t>(b[n])
                         ? 0.0
                         : std::abs(static_cast<double>(a[n]) - static_cast<double>(b[n]));
    m.max_abs_error = std::max(m.max_abs_error, e);
    sq += e * e;
  }
  const double count = static_cast<double>(a.size());
  m.rmse = std::sqrt(sq / count);
  const double range = value_range(a).span();
  m.psnr = m.rmse > 0.0 ? 20.0 * std::log10(range / m.rmse) : std::numeric_limits<double>::infinity();
  if (compressed_bytes > 0) {
    m.compression_ratio = count * sizeof(float) / static_cast<double>(compressed_bytes);
    m.bit_rate = 8.0 * static_cast<double>(compressed_bytes) / count;
  }
  return m;
}

}  // namespace ftlz
