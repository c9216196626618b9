#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ftlz/container.hpp"
#include "ftlz/core.hpp"
#include "ftlz/predict.hpp"
#include "ftlz/quantize.hpp"

namespace ftlz {

/// Protection switches. All on is the fault-tolerant compressor; all off is
/// the plain independent-block compressor it is measured against.
struct FtConfig {
  bool protect_input = true;
  bool protect_bins = true;
  bool duplicate_eval = true;
  bool store_sum_dc = true;
  QuantConfig quant;
  std::uint32_t block_edge = static_cast<std::uint32_t>(kDefaultBlockEdge);
  std::uint8_t codec = 0;
  int threads = 0;  // 0 = OpenMP default

  static FtConfig protected_defaults() { return {}; }
  static FtConfig unprotected() {
    FtConfig c;
    c.protect_input = c.protect_bins = c.duplicate_eval = c.store_sum_dc = false;
    return c;
  }
  bool all_on() const { return protect_input && protect_bins && duplicate_eval && store_sum_dc; }
};

enum class DupSite { prediction, reconstruction };

/// Test instrumentation. Every member is optional; an empty hook costs one
/// branch. Hooks run on worker threads and must be thread-safe.
struct FaultHooks {
  /// Block's working input, after its checksums were taken.
  std::function<void(std::size_t block, std::span<float> input)> input_after_checksum;
  std::function<void(std::size_t block, RegressionCoeffs& coeffs)> regression_fit;
  std::function<void(std::size_t block, PredictorEstimate& estimate)> sampling;
  /// Block's bin array once it is final.
  std::function<void(std::size_t block, std::span<std::uint32_t> bins)> bins_finalized;
  /// One evaluation inside duplicated prediction / reconstruction.
  std::function<void(DupSite site, std::size_t block, std::size_t point, int attempt, float& value)> computation;
  /// Decoded block before verification; attempt 1 is the re-execution.
  std::function<void(std::size_t block, int attempt, std::span<float> decoded)> decompressed;
};

enum class FtEvent : std::uint8_t {
  input_corrected,
  bins_corrected,
  dup_mismatch_resolved,
  decomp_block_reexecuted,
};

const char* to_string(FtEvent e);

struct FtEventRecord {
  std::size_t block = 0;
  FtEvent event = FtEvent::input_corrected;
  std::size_t count = 1;

  friend bool operator==(const FtEventRecord&, const FtEventRecord&) = default;
};

enum class FtStatus { clean, corrected, sdc_in_compression };

const char* to_string(FtStatus s);

struct FtReport {
  FtStatus status = FtStatus::clean;
  std::vector<FtEventRecord> events;  // ordered by block
  std::string diagnostic;

  std::size_t count(FtEvent e) const;
  bool has(FtEvent e) const { return count(e) > 0; }
};

struct CompressResult {
  CompressedStream stream;
  FtReport report;
};

CompressResult compress(const Field& field, const ErrorBound& bound, const FtConfig& cfg,
                        const FaultHooks* hooks = nullptr);

struct DecompressOptions {
  int threads = 0;
  const FaultHooks* hooks = nullptr;
};

struct DecompressResult {
  std::optional<Field> field;  // withheld on SDC in compression
  FtReport report;
  std::size_t blocks_decoded = 0;
};

DecompressResult decompress(const CompressedStream& stream, const DecompressOptions& opts = {});

/// Half-open box [lo, hi) in field coordinates.
struct Region {
  std::array<std::size_t, 3> lo{};
  std::array<std::size_t, 3> hi{};

  std::size_t volume() const { return (hi[0] - lo[0]) * (hi[1] - lo[1]) * (hi[2] - lo[2]); }
};

/// Decodes only the blocks that intersect `region`.
DecompressResult decompress_region(const CompressedStream& stream, const Region& region,
                                   const DecompressOptions& opts = {});

/// Indices of the blocks intersecting `region`, in canonical order.
std::vector<std::size_t> blocks_in_region(const BlockGrid& grid, const Region& region);

/// Worst-case percentage drop of the compression ratio when one of `n_blocks`
/// equally compressible blocks falls to ratio 1: (r0-1)/(r0+n-1) * 100.
double cr_decrease_bound(double r0, std::uint64_t n_blocks);

/// Same model with `k` blocks degraded: k(r0-1)/(n + k(r0-1)) * 100.
double cr_decrease_envelope(double r0, std::uint64_t n_blocks, std::uint64_t k);

}  // namespace ftlz
