#include "ftlz/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ftlz/checksum.hpp"
#include "ftlz/codec.hpp"
#include "ftlz/dup_eval.hpp"
#include "ftlz/errors.hpp"
#include "ftlz/huffman.hpp"
#include "ftlz/parallel.hpp"

namespace ftlz {

const char* to_string(FtEvent e) {
  switch (e) {
    case FtEvent::input_corrected: return "input_corrected";
    case FtEvent::bins_corrected: return "bins_corrected";
    case FtEvent::dup_mismatch_resolved: return "dup_mismatch_resolved";
    case FtEvent::decomp_block_reexecuted: return "decomp_block_reexecuted";
  }
  return "?";
}

const char* to_string(FtStatus s) {
  switch (s) {
    case FtStatus::clean: return "clean";
    case FtStatus::corrected: return "corrected";
    case FtStatus::sdc_in_compression: return "sdc_in_compression";
  }
  return "?";
}

std::size_t FtReport::count(FtEvent e) const {
  std::size_t n = 0;
  for (const auto& r : events)
    if (r.event == e) n += r.count;
  return n;
}

namespace {

struct BlockWork {
  std::vector<float> input;
  RegressionCoeffs coeffs;
  ChecksumPair input_ck;
  PredictorEstimate estimate;
  std::vector<std::uint32_t> bins;
  std::vector<std::uint32_t> unpredictable;
  ChecksumPair bins_ck;
  std::uint64_t sum_dc = 0;
  BitWriter bits;
  std::vector<FtEventRecord> events;
};

void validate(const FtConfig& cfg) {
  if (!cfg.quant.valid()) throw InvalidArgument("bin capacity must be a power of two >= 4");
  if (!codec_registered(cfg.codec)) throw UnsupportedCodec("codec id " + std::to_string(cfg.codec) + " is not registered");
}

// Predict, quantize and reconstruct one block in canonical order.
void encode_points(BlockWork& w, const BlockSpec& spec, double eb, const FtConfig& cfg, const FaultHooks* hooks) {
  const Extent& ext = spec.extent;
  const std::size_t vol = spec.volume();
  const bool regression = w.estimate.chosen == PredictorKind::regression;
  const auto& in = w.input;
  std::vector<float> dec(vol);
  w.bins.assign(vol, kUnpredictableBin);
  w.unpredictable.clear();

  const bool hooked = hooks && hooks->computation;
  std::size_t mismatches = 0;
  auto evaluate = [&](DupSite site, std::size_t point, auto&& compute) -> DupResult {
    auto perturb = [&](int attempt, float& v) {
      if (hooked) hooks->computation(site, spec.block_index, point, attempt, v);
    };
    if (cfg.duplicate_eval) {
      DupResult r = duplicated_eval(compute, perturb);
      if (r.mismatch) ++mismatches;
      return r;
    }
    float v = compute();
    perturb(0, v);
    return {v, 1, false, true};
  };

  std::size_t n = 0;
  for (std::size_t i = 0; i < ext[0]; ++i)
    for (std::size_t j = 0; j < ext[1]; ++j)
      for (std::size_t k = 0; k < ext[2]; ++k, ++n) {
        const float ori = in[n];
        const DupResult pred = evaluate(DupSite::prediction, n, [&] {
          return regression ? regression_predict(w.coeffs, i, j, k) : lorenzo_predict(dec, ext, i, j, k);
        });

        std::uint32_t bin = kUnpredictableBin;
        float out = ori;
        if (pred.resolved) {
          const auto q = quantize_diff(static_cast<double>(ori) - static_cast<double>(pred.value), eb, cfg.quant);
          if (q) {
            const DupResult rec =
                evaluate(DupSite::reconstruction, n, [&] { return reconstruct(pred.value, *q, eb, cfg.quant); });
            if (rec.resolved && double_check(ori, rec.value, eb) == BoundCheck::keep) {
              bin = *q;
              out = rec.value;
            }
          }
        }
        if (bin == kUnpredictableBin) w.unpredictable.push_back(store_unpredictable(ori));
        w.bins[n] = bin;
        dec[n] = out;
      }

  w.sum_dc = word_sum(dec);
  if (mismatches) w.events.push_back({spec.block_index, FtEvent::dup_mismatch_resolved, mismatches});
}

}  // namespace

CompressResult compress(const Field& field, const ErrorBound& bound, const FtConfig& cfg, const FaultHooks* hooks) {
  validate(cfg);
  const double eb = resolve_error_bound(bound, field);
  const BlockGrid grid = partition(field.dims(), cfg.block_edge);
  const std::size_t nblocks = grid.size();
  std::vector<BlockWork> work(nblocks);

  // Regression fit and input checksums.
  for_each_block(nblocks, cfg.threads, [&](std::size_t b) {
    BlockWork& w = work[b];
    w.input = gather_block(field, grid[b]);
    w.coeffs = fit_regression(w.input, grid[b].extent);
    if (hooks && hooks->regression_fit) hooks->regression_fit(b, w.coeffs);
    if (cfg.protect_input) w.input_ck = checksum_block(w.input);
  });

  // Predictor selection.
  for_each_block(nblocks, cfg.threads, [&](std::size_t b) {
    BlockWork& w = work[b];
    w.estimate = sample_select(w.input, grid[b].extent, w.coeffs);
    if (hooks && hooks->sampling) hooks->sampling(b, w.estimate);
  });

  // Input verification, prediction and quantization.
  for_each_block(nblocks, cfg.threads, [&](std::size_t b) {
    BlockWork& w = work[b];
    if (hooks && hooks->input_after_checksum) hooks->input_after_checksum(b, w.input);
    if (cfg.protect_input) {
      const CorrectionOutcome fix = locate_and_correct(std::span<float>(w.input), w.input_ck);
      if (fix.status == CorrectionStatus::uncorrectable)
        throw UncorrectableCorruption("input block " + std::to_string(b) + " holds more than one corrupted value");
      if (fix.status == CorrectionStatus::corrected) w.events.push_back({b, FtEvent::input_corrected, 1});
    }
    encode_points(w, grid[b], eb, cfg, hooks);
    if (cfg.protect_bins) w.bins_ck = checksum_words(w.bins);
    if (hooks && hooks->bins_finalized) hooks->bins_finalized(b, w.bins);
  });

  // Bin-array verification ahead of entropy coding.
  if (cfg.protect_bins) {
    for_each_block(nblocks, cfg.threads, [&](std::size_t b) {
      BlockWork& w = work[b];
      const CorrectionOutcome fix = locate_and_correct(std::span<std::uint32_t>(w.bins), w.bins_ck);
      if (fix.status == CorrectionStatus::uncorrectable)
        throw UncorrectableCorruption("bin array of block " + std::to_string(b) + " holds more than one corrupted value");
      if (fix.status == CorrectionStatus::corrected) w.events.push_back({b, FtEvent::bins_corrected, 1});
    });
  }

  std::vector<std::uint64_t> freq(cfg.quant.bin_capacity, 0);
  for (std::size_t b = 0; b < nblocks; ++b)
    for (std::uint32_t s : work[b].bins) {
      if (s >= cfg.quant.bin_capacity)
        throw InternalInvariantViolation("bin " + std::to_string(s) + " in block " + std::to_string(b) +
                                         " is outside the bin range");
      ++freq[s];
    }
  const HuffmanCodebook book = HuffmanCodebook::from_frequencies(freq);

  for_each_block(nblocks, cfg.threads, [&](std::size_t b) {
    const std::uint64_t bits = encode_block(work[b].bins, book, work[b].bits);
    if (bits > 0xFFFFFFFFull) throw InternalInvariantViolation("block bitstream exceeds 2^32 bits");
  });

  CompressResult result;
  CompressedStream& s = result.stream;
  s.header.codec = cfg.codec;
  s.header.dims = field.dims();
  s.header.block_edge = cfg.block_edge;
  s.header.bound = bound;
  s.header.eb_abs = eb;
  s.header.bin_capacity = cfg.quant.bin_capacity;
  s.header.block_count = nblocks;
  s.codebook = book.lengths();
  s.blocks.resize(nblocks);

  BitWriter payload;
  std::vector<std::uint64_t> sums(nblocks);
  for (std::size_t b = 0; b < nblocks; ++b) {
    BlockWork& w = work[b];
    BlockRecord& rec = s.blocks[b];
    rec.predictor = w.estimate.chosen;
    if (rec.predictor == PredictorKind::regression) rec.coeffs = w.coeffs;
    rec.unpredictable_count = static_cast<std::uint32_t>(w.unpredictable.size());
    rec.bit_length = static_cast<std::uint32_t>(w.bits.bit_length());
    payload.append(w.bits);
    s.unpredictable.insert(s.unpredictable.end(), w.unpredictable.begin(), w.unpredictable.end());
    sums[b] = w.sum_dc;
    result.report.events.insert(result.report.events.end(), w.events.begin(), w.events.end());
  }
  s.payload = backend_apply(payload.bytes(), cfg.codec);
  if (cfg.store_sum_dc) {
    const auto raw = sum_dc_bytes(sums);
    s.sum_dc_raw_length = raw.size();
    s.sum_dc = backend_apply(raw, cfg.codec);
  }

  result.report.status = result.report.events.empty() ? FtStatus::clean : FtStatus::corrected;
  return result;
}

namespace {

// Shared state for full and region decompression.
class Decoder {
 public:
  explicit Decoder(const CompressedStream& s)
      : s_(s),
        grid_(s.header.dims, s.header.block_edge),
        quant_{s.header.bin_capacity},
        eb_(s.header.eb_abs),
        offsets_(block_offsets(s)) {
    if (grid_.size() != s.blocks.size()) throw CorruptStream("block table does not match the tiling");
    book_ = HuffmanCodebook::from_lengths(s.codebook);
    raw_payload_ = backend_invert(s.payload, s.header.codec);
    if (offsets_.bit_offset.back() > static_cast<std::uint64_t>(raw_payload_.size()) * 8)
      throw CorruptStream("block bit lengths exceed the payload");
    if (s.has_sum_dc()) sum_dc_ = sum_dc_values(backend_invert(s.sum_dc, s.header.codec), s.blocks.size());
  }

  const BlockGrid& grid() const { return grid_; }
  bool verifies() const { return !sum_dc_.empty(); }
  std::uint64_t expected_sum(std::size_t b) const { return sum_dc_[b]; }

  /// Random-access decode of one block into `out`.
  void decode(std::size_t b, std::span<float> out) const {
    const BlockSpec& spec = grid_[b];
    const BlockRecord& rec = s_.blocks[b];
    const std::size_t vol = spec.volume();
    if (rec.unpredictable_count > vol) throw CorruptStream("block " + std::to_string(b) + " claims too many unpredictable values");

    const auto bins = decode_block(raw_payload_, offsets_.bit_offset[b], rec.bit_length, book_, vol);
    UnpredictableReader unpred(std::span<const std::uint32_t>(s_.unpredictable)
                                   .subspan(static_cast<std::size_t>(offsets_.unpredictable_offset[b]),
                                            rec.unpredictable_count));
    const Extent& ext = spec.extent;
    const bool regression = rec.predictor == PredictorKind::regression;
    std::size_t n = 0;
    for (std::size_t i = 0; i < ext[0]; ++i)
      for (std::size_t j = 0; j < ext[1]; ++j)
        for (std::size_t k = 0; k < ext[2]; ++k, ++n) {
          if (bins[n] == kUnpredictableBin) {
            out[n] = unpred.next();
            continue;
          }
          const float pred = regression ? regression_predict(rec.coeffs, i, j, k) : lorenzo_predict(out, ext, i, j, k);
          out[n] = reconstruct(pred, bins[n], eb_, quant_);
        }
    if (!unpred.exhausted()) throw CorruptStream("block " + std::to_string(b) + " left unpredictable values unused");
  }

 private:
  const CompressedStream& s_;
  BlockGrid grid_;
  QuantConfig quant_;
  double eb_;
  BlockOffsets offsets_;
  HuffmanCodebook book_;
  std::vector<std::uint8_t> raw_payload_;
  std::vector<std::uint64_t> sum_dc_;
};

struct BlockOutcome {
  bool reexecuted = false;
  bool failed = false;
  std::string diagnostic;
};

// Decode, verify against the stored checksum, and re-execute once on mismatch.
BlockOutcome decode_verified(const Decoder& dec, std::size_t b, std::span<float> out, const FaultHooks* hooks) {
  auto attempt = [&](int n, std::string& why) -> bool {
    try {
      dec.decode(b, out);
    } catch (const CorruptStream& e) {
      if (!dec.verifies()) throw;
      why = e.what();
      return false;
    }
    if (hooks && hooks->decompressed) hooks->decompressed(b, n, out);
    if (!dec.verifies()) return true;
    if (word_sum(out) == dec.expected_sum(b)) return true;
    why = "checksum mismatch";
    return false;
  };

  BlockOutcome o;
  std::string why;
  if (attempt(0, why)) return o;
  o.reexecuted = true;
  if (attempt(1, why)) return o;
  o.failed = true;
  o.diagnostic = "SDC in compression: block " + std::to_string(b) + " failed verification twice (" + why + ")";
  return o;
}

DecompressResult run_decode(const CompressedStream& stream, const std::vector<std::size_t>& blocks, const Region& region,
                            const DecompressOptions& opts) {
  const Decoder dec(stream);
  const BlockGrid& grid = dec.grid();
  const Dims out_dims{region.hi[0] - region.lo[0], region.hi[1] - region.lo[1], region.hi[2] - region.lo[2]};
  Field out(out_dims);
  std::vector<BlockOutcome> outcomes(blocks.size());

  for_each_block(blocks.size(), opts.threads, [&](std::size_t n) {
    const std::size_t b = blocks[n];
    const BlockSpec& spec = grid[b];
    std::vector<float> buf(spec.volume());
    outcomes[n] = decode_verified(dec, b, buf, opts.hooks);
    if (outcomes[n].failed) return;
    // Copy the block's overlap with the region.
    std::array<std::size_t, 3> lo{}, hi{};
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::max(spec.origin[a], region.lo[a]);
      hi[a] = std::min(spec.origin[a] + spec.extent[a], region.hi[a]);
    }
    for (std::size_t i = lo[0]; i < hi[0]; ++i)
      for (std::size_t j = lo[1]; j < hi[1]; ++j) {
        const std::size_t src = spec.offset(i - spec.origin[0], j - spec.origin[1], lo[2] - spec.origin[2]);
        const std::size_t dst = out_dims.index(i - region.lo[0], j - region.lo[1], lo[2] - region.lo[2]);
        std::copy_n(buf.begin() + static_cast<std::ptrdiff_t>(src), hi[2] - lo[2],
                    out.values().begin() + static_cast<std::ptrdiff_t>(dst));
      }
  });

  DecompressResult result;
  result.blocks_decoded = blocks.size();
  for (std::size_t n = 0; n < blocks.size(); ++n) {
    if (outcomes[n].reexecuted) result.report.events.push_back({blocks[n], FtEvent::decomp_block_reexecuted, 1});
    if (outcomes[n].failed && result.report.status != FtStatus::sdc_in_compression) {
      result.report.status = FtStatus::sdc_in_compression;
      result.report.diagnostic = outcomes[n].diagnostic;
    }
  }
  if (result.report.status == FtStatus::sdc_in_compression) return result;
  result.report.status = result.report.events.empty() ? FtStatus::clean : FtStatus::corrected;
  result.field = std::move(out);
  return result;
}

}  // namespace

std::vector<std::size_t> blocks_in_region(const BlockGrid& grid, const Region& region) {
  const std::size_t e = grid.block_edge();
  const auto& c = grid.counts();
  std::vector<std::size_t> out;
  for (std::size_t bi = region.lo[0] / e; bi <= (region.hi[0] - 1) / e; ++bi)
    for (std::size_t bj = region.lo[1] / e; bj <= (region.hi[1] - 1) / e; ++bj)
      for (std::size_t bk = region.lo[2] / e; bk <= (region.hi[2] - 1) / e; ++bk)
        out.push_back((bi * c[1] + bj) * c[2] + bk);
  return out;
}

DecompressResult decompress(const CompressedStream& stream, const DecompressOptions& opts) {
  const Dims& d = stream.header.dims;
  std::vector<std::size_t> all(stream.blocks.size());
  for (std::size_t b = 0; b < all.size(); ++b) all[b] = b;
  return run_decode(stream, all, Region{{0, 0, 0}, {d.nx, d.ny, d.nz}}, opts);
}

DecompressResult decompress_region(const CompressedStream& stream, const Region& region, const DecompressOptions& opts) {
  const Dims& d = stream.header.dims;
  const std::array<std::size_t, 3> full{d.nx, d.ny, d.nz};
  for (int a = 0; a < 3; ++a)
    if (region.lo[a] >= region.hi[a] || region.hi[a] > full[a])
      throw InvalidRegion("region axis " + std::to_string(a) + " [" + std::to_string(region.lo[a]) + ", " +
                          std::to_string(region.hi[a]) + ") is empty or outside [0, " + std::to_string(full[a]) + ")");
  const BlockGrid grid(d, stream.header.block_edge);
  return run_decode(stream, blocks_in_region(grid, region), region, opts);
}

double cr_decrease_bound(double r0, std::uint64_t n_blocks) { return cr_decrease_envelope(r0, n_blocks, 1); }

double cr_decrease_envelope(double r0, std::uint64_t n_blocks, std::uint64_t k) {
  if (!(r0 >= 1.0) || !std::isfinite(r0)) throw InvalidArgument("baseline compression ratio must be >= 1");
  if (n_blocks < 1) throw InvalidArgument("block count must be positive");
  if (k > n_blocks) throw InvalidArgument("cannot degrade more blocks than exist");
  const double kd = static_cast<double>(k);
  return kd * (r0 - 1.0) / (static_cast<double>(n_blocks) + kd * (r0 - 1.0)) * 100.0;
}

}  // namespace ftlz
