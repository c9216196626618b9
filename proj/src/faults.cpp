#include "ftlz/faults.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <limits>
#include <random>

#include "ftlz/container.hpp"
#include "ftlz/errors.hpp"
#include "ftlz/parallel.hpp"

namespace ftlz {

const char* to_string(InjectionTarget t) {
  switch (t) {
    case InjectionTarget::input_after_checksum: return "input";
    case InjectionTarget::bin_array: return "bins";
    case InjectionTarget::regression_fit: return "regression";
    case InjectionTarget::sampling: return "sampling";
    case InjectionTarget::decompressed_buffer: return "decomp";
    case InjectionTarget::compressed_bytes: return "bytes";
  }
  return "?";
}

InjectionTarget parse_target(const std::string& name) {
  for (auto t : {InjectionTarget::input_after_checksum, InjectionTarget::bin_array, InjectionTarget::regression_fit,
                 InjectionTarget::sampling, InjectionTarget::decompressed_buffer, InjectionTarget::compressed_bytes})
    if (name == to_string(t)) return t;
  throw InvalidArgument("unknown injection target: " + name);
}

const char* to_string(TrialClass c) {
  switch (c) {
    case TrialClass::bounded: return "bounded";
    case TrialClass::unbounded: return "unbounded";
    case TrialClass::crash: return "crash";
  }
  return "?";
}

namespace {

template <class Word, class T>
void flip(std::span<T> buffer, std::size_t element, unsigned bit) {
  if (element >= buffer.size())
    throw InvalidInjection("element " + std::to_string(element) + " outside buffer of " + std::to_string(buffer.size()));
  if (bit >= 8 * sizeof(T)) throw InvalidInjection("bit " + std::to_string(bit) + " outside a " + std::to_string(8 * sizeof(T)) + "-bit word");
  auto w = std::bit_cast<Word>(buffer[element]);
  w ^= static_cast<Word>(Word{1} << bit);
  buffer[element] = std::bit_cast<T>(w);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

bool bit_identical(const Field& a, const Field& b) {
  if (a.dims() != b.dims()) return false;
  const auto x = a.values();
  const auto y = b.values();
  for (std::size_t n = 0; n < x.size(); ++n)
    if (std::bit_cast<std::uint32_t>(x[n]) != std::bit_cast<std::uint32_t>(y[n])) return false;
  return true;
}

double max_abs_error(const Field& a, const Field& b) {
  double m = 0.0;
  const auto x = a.values();
  const auto y = b.values();
  for (std::size_t n = 0; n < x.size(); ++n) {
    if (std::bit_cast<std::uint32_t>(x[n]) == std::bit_cast<std::uint32_t>(y[n])) continue;
    const double e = std::abs(static_cast<double>(x[n]) - static_cast<double>(y[n]));
    if (std::isnan(e)) return std::numeric_limits<double>::infinity();
    m = std::max(m, e);
  }
  return m;
}

ResolvedInjection resolve(const InjectionPlan& plan, const BlockGrid& grid, std::size_t archive_size) {
  std::mt19937_64 rng(plan.seed);
  auto draw = [&rng](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  ResolvedInjection r;
  r.block = plan.block ? *plan.block : draw(grid.size());
  if (plan.target != InjectionTarget::compressed_bytes && r.block >= grid.size())
    throw InvalidInjection("block " + std::to_string(r.block) + " outside the " + std::to_string(grid.size()) + "-block grid");

  std::size_t elements = 0;
  unsigned bits = 32;
  switch (plan.target) {
    case InjectionTarget::input_after_checksum:
    case InjectionTarget::bin_array:
    case InjectionTarget::decompressed_buffer:
      elements = grid[r.block].volume();
      break;
    case InjectionTarget::regression_fit:
      elements = 4;
      break;
    case InjectionTarget::sampling:
      elements = 3;
      break;
    case InjectionTarget::compressed_bytes:
      elements = archive_size;
      bits = 8;
      break;
  }
  r.element = plan.element ? *plan.element : draw(elements);
  if (r.element >= elements)
    throw InvalidInjection("element " + std::to_string(r.element) + " outside [0, " + std::to_string(elements) + ")");
  if (plan.target == InjectionTarget::sampling) bits = r.element < 2 ? 64 : 1;
  r.bit = plan.bit ? *plan.bit : static_cast<unsigned>(draw(bits));
  if (r.bit >= bits) throw InvalidInjection("bit " + std::to_string(r.bit) + " outside a " + std::to_string(bits) + "-bit word");
  return r;
}

void apply_sampling_fault(PredictorEstimate& est, std::size_t element, unsigned bit) {
  if (element == 2) {
    est.chosen = est.chosen == PredictorKind::lorenzo ? PredictorKind::regression : PredictorKind::lorenzo;
    return;
  }
  double& v = element == 0 ? est.e_reg : est.e_lor;
  v = std::bit_cast<double>(std::bit_cast<std::uint64_t>(v) ^ (std::uint64_t{1} << bit));
  est.chosen = choose_predictor(est.e_reg, est.e_lor);
}

}  // namespace

void inject_bitflip(std::span<float> buffer, std::size_t element, unsigned bit) { flip<std::uint32_t>(buffer, element, bit); }
void inject_bitflip(std::span<double> buffer, std::size_t element, unsigned bit) { flip<std::uint64_t>(buffer, element, bit); }
void inject_bitflip(std::span<std::uint32_t> buffer, std::size_t element, unsigned bit) {
  flip<std::uint32_t>(buffer, element, bit);
}
void inject_bitflip(std::span<std::uint8_t> buffer, std::size_t element, unsigned bit) {
  flip<std::uint8_t>(buffer, element, bit);
}

TrialBaseline make_baseline(const Field& field, const ErrorBound& bound, const FtConfig& cfg) {
  TrialBaseline base;
  const CompressResult c = compress(field, bound, cfg);
  base.archive = serialize(c.stream);
  base.eb_abs = c.stream.header.eb_abs;
  base.block_count = c.stream.blocks.size();
  base.ratio = static_cast<double>(field.size() * sizeof(float)) / static_cast<double>(base.archive.size());
  DecompressResult d = decompress(c.stream, {cfg.threads, nullptr});
  if (!d.field) throw InternalInvariantViolation("fault-free baseline failed verification: " + d.report.diagnostic);
  base.decompressed = std::move(*d.field);
  return base;
}

TrialOutcome run_trial(const Field& field, const ErrorBound& bound, const FtConfig& cfg, const InjectionPlan& plan,
                       const TrialBaseline* baseline) {
  TrialBaseline local;
  if (!baseline) {
    local = make_baseline(field, bound, cfg);
    baseline = &local;
  }
  const BlockGrid grid(field.dims(), cfg.block_edge);

  TrialOutcome out;
  out.target = plan.target;
  out.where = resolve(plan, grid, baseline->archive.size());
  const ResolvedInjection at = out.where;

  std::atomic<bool> fired{false};
  FaultHooks hooks;
  switch (plan.target) {
    case InjectionTarget::input_after_checksum:
      hooks.input_after_checksum = [&](std::size_t b, std::span<float> input) {
        if (b != at.block) return;
        inject_bitflip(input, at.element, at.bit);
        fired = true;
      };
      break;
    case InjectionTarget::bin_array:
      hooks.bins_finalized = [&](std::size_t b, std::span<std::uint32_t> bins) {
        if (b != at.block) return;
        inject_bitflip(bins, at.element, at.bit);
        fired = true;
      };
      break;
    case InjectionTarget::regression_fit:
      hooks.regression_fit = [&](std::size_t b, RegressionCoeffs& c) {
        if (b != at.block) return;
        inject_bitflip(std::span<float>(c.b), at.element, at.bit);
        fired = true;
      };
      break;
    case InjectionTarget::sampling:
      hooks.sampling = [&](std::size_t b, PredictorEstimate& est) {
        if (b != at.block) return;
        apply_sampling_fault(est, at.element, at.bit);
        fired = true;
      };
      break;
    case InjectionTarget::decompressed_buffer:
      hooks.decompressed = [&](std::size_t b, int attempt, std::span<float> dec) {
        if (b != at.block || attempt != 0) return;
        inject_bitflip(dec, at.element, at.bit);
        fired = true;
      };
      break;
    case InjectionTarget::compressed_bytes:
      break;
  }

  try {
    std::vector<std::uint8_t> archive;
    if (plan.target == InjectionTarget::compressed_bytes) {
      archive = baseline->archive;
      inject_bitflip(std::span<std::uint8_t>(archive), at.element, at.bit);
      fired = true;
    } else {
      CompressResult c = compress(field, bound, cfg, &hooks);
      out.compress_report = std::move(c.report);
      archive = serialize(c.stream);
    }
    out.compressed_bytes = archive.size();
    out.ratio = static_cast<double>(field.size() * sizeof(float)) / static_cast<double>(archive.size());

    const CompressedStream stream = parse(archive);
    DecompressResult d = decompress(stream, {cfg.threads, &hooks});
    out.decompress_report = std::move(d.report);
    if (!d.field) {
      out.cls = TrialClass::crash;
      out.diagnostic = out.decompress_report.diagnostic;
    } else {
      out.max_abs_error = max_abs_error(field, *d.field);
      out.cls = out.max_abs_error <= baseline->eb_abs ? TrialClass::bounded : TrialClass::unbounded;
      out.identical_to_clean = bit_identical(*d.field, baseline->decompressed);
    }
  } catch (const InvalidInjection&) {
    throw;
  } catch (const Error& e) {
    out.cls = TrialClass::crash;
    out.diagnostic = e.what();
  }
  out.fired = fired;
  out.corrected = out.compress_report.status == FtStatus::corrected || out.decompress_report.status == FtStatus::corrected;
  return out;
}

std::uint64_t trial_seed(std::uint64_t campaign_seed, std::size_t cell, std::size_t trial) {
  return splitmix64(splitmix64(campaign_seed ^ splitmix64(cell)) + trial);
}

std::vector<CampaignCell> run_campaign(const Field& field, const CampaignSpec& spec) {
  if (spec.trials == 0) throw InvalidArgument("a campaign needs at least one trial per cell");
  std::vector<CampaignCell> cells;
  for (const CfgVariant& v : spec.variants)
    for (InjectionTarget t : spec.targets)
      for (const ErrorBound& eb : spec.bounds) cells.push_back({t, eb, v.name, {}});

  std::size_t cell_index = 0;
  for (const CfgVariant& v : spec.variants) {
    FtConfig cfg = v.cfg;
    cfg.threads = 1;
    for (std::size_t t = 0; t < spec.targets.size(); ++t)
      for (const ErrorBound& eb : spec.bounds) {
        CampaignCell& cell = cells[cell_index];
        const TrialBaseline base = make_baseline(field, eb, cfg);
        std::vector<TrialOutcome> outcomes(spec.trials);
        for_each_block(spec.trials, spec.threads, [&](std::size_t n) {
          InjectionPlan plan;
          plan.target = cell.target;
          plan.seed = trial_seed(spec.seed, cell_index, n);
          outcomes[n] = run_trial(field, eb, cfg, plan, &base);
        });

        CampaignReport& r = cell.report;
        r.trials = spec.trials;
        r.baseline_ratio = base.ratio;
        r.min_ratio = std::numeric_limits<double>::infinity();
        double ratio_sum = 0.0;
        for (const TrialOutcome& o : outcomes) {
          switch (o.cls) {
            case TrialClass::bounded: ++r.bounded; break;
            case TrialClass::unbounded: ++r.unbounded; break;
            case TrialClass::crash: ++r.crashes; break;
          }
          if (o.corrected) ++r.corrected;
          if (o.identical_to_clean) ++r.identical;
          ratio_sum += o.ratio;
          r.min_ratio = std::min(r.min_ratio, o.ratio);
        }
        r.mean_ratio = ratio_sum / static_cast<double>(outcomes.size());
        r.outcomes = std::move(outcomes);
        ++cell_index;
      }
  }
  return cells;
}

RatioCampaign run_ratio_campaign(const Field& field, const ErrorBound& bound, const FtConfig& cfg, std::size_t max_k,
                                 std::size_t trials_per_k, std::uint64_t seed) {
  const TrialBaseline base = make_baseline(field, bound, cfg);
  RatioCampaign rc;
  rc.r0 = base.ratio;
  rc.block_count = base.block_count;
  if (max_k > base.block_count) throw InvalidArgument("more faulted blocks requested than the field holds");

  for (std::size_t k = 1; k <= max_k; ++k)
    for (std::size_t t = 0; t < trials_per_k; ++t) {
      std::mt19937_64 rng(trial_seed(seed, k, t));
      std::vector<std::size_t> blocks(base.block_count);
      for (std::size_t b = 0; b < blocks.size(); ++b) blocks[b] = b;
      for (std::size_t n = 0; n < k; ++n) std::swap(blocks[n], blocks[n + rng() % (blocks.size() - n)]);
      blocks.resize(k);
      std::sort(blocks.begin(), blocks.end());

      // Trial 0 of every k inverts the selection on all k blocks; the rest draw
      // one random regression-fit or selection fault per block.
      RatioTrial rt;
      rt.k = k;
      rt.forced = t == 0;
      struct Fault {
        bool on_selection;
        std::size_t element;
        unsigned bit;
      };
      std::vector<Fault> faults(k);
      for (auto& f : faults) {
        if (rt.forced) {
          f = {true, 2, 0};
        } else if (rng() % 2 == 0) {
          f = {false, static_cast<std::size_t>(rng() % 4), static_cast<unsigned>(rng() % 32)};
        } else {
          const auto e = static_cast<std::size_t>(rng() % 3);
          f = {true, e, e < 2 ? static_cast<unsigned>(rng() % 64) : 0u};
        }
      }
      auto slot = [&](std::size_t b) -> const Fault* {
        const auto it = std::lower_bound(blocks.begin(), blocks.end(), b);
        return (it != blocks.end() && *it == b) ? &faults[static_cast<std::size_t>(it - blocks.begin())] : nullptr;
      };
      FaultHooks hooks;
      hooks.regression_fit = [&](std::size_t b, RegressionCoeffs& c) {
        if (const Fault* f = slot(b); f && !f->on_selection) inject_bitflip(std::span<float>(c.b), f->element, f->bit);
      };
      hooks.sampling = [&](std::size_t b, PredictorEstimate& est) {
        if (const Fault* f = slot(b); f && f->on_selection) apply_sampling_fault(est, f->element, f->bit);
      };

      const CompressResult c = compress(field, bound, cfg, &hooks);
      const auto archive = serialize(c.stream);
      rt.ratio = static_cast<double>(field.size() * sizeof(float)) / static_cast<double>(archive.size());
      rt.decrease_pct = (rc.r0 - rt.ratio) / rc.r0 * 100.0;
      rt.envelope_pct = cr_decrease_envelope(rc.r0, rc.block_count, k);
      const DecompressResult d = decompress(c.stream, {cfg.threads, nullptr});
      rt.bounded = d.field && max_abs_error(field, *d.field) <= base.eb_abs;
      rc.trials.push_back(rt);
    }
  return rc;
}

}  // namespace ftlz
