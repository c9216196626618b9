#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ftlz/core.hpp"
#include "ftlz/pipeline.hpp"

namespace ftlz {

enum class InjectionTarget {
  input_after_checksum,
  bin_array,
  regression_fit,
  sampling,
  decompressed_buffer,
  compressed_bytes,
};

/// Short names used by the CLI and reports: input, bins, regression,
/// sampling, decomp, bytes.
const char* to_string(InjectionTarget t);
InjectionTarget parse_target(const std::string& name);

/// Unset fields are drawn from the plan's seed.
///
/// Element meaning per target: a value index within the block for input,
/// bins and decomp; a coefficient index (0..3) for regression; 0 = e_reg,
/// 1 = e_lor, 2 = the chosen predictor itself for sampling; a byte offset in
/// the serialized archive for bytes.
struct InjectionPlan {
  InjectionTarget target = InjectionTarget::input_after_checksum;
  std::optional<std::size_t> block;
  std::optional<std::size_t> element;
  std::optional<unsigned> bit;
  std::uint64_t seed = 0;
};

struct ResolvedInjection {
  std::size_t block = 0;
  std::size_t element = 0;
  unsigned bit = 0;
};

void inject_bitflip(std::span<float> buffer, std::size_t element, unsigned bit);
void inject_bitflip(std::span<double> buffer, std::size_t element, unsigned bit);
void inject_bitflip(std::span<std::uint32_t> buffer, std::size_t element, unsigned bit);
void inject_bitflip(std::span<std::uint8_t> buffer, std::size_t element, unsigned bit);

enum class TrialClass { bounded, unbounded, crash };

const char* to_string(TrialClass c);

struct TrialOutcome {
  InjectionTarget target = InjectionTarget::input_after_checksum;
  ResolvedInjection where;
  TrialClass cls = TrialClass::bounded;
  bool fired = false;
  bool corrected = false;
  bool identical_to_clean = false;
  FtReport compress_report;
  FtReport decompress_report;
  double max_abs_error = 0.0;
  double ratio = 0.0;
  std::size_t compressed_bytes = 0;
  std::string diagnostic;
};

/// Fault-free reference run for one (field, bound, config) cell.
struct TrialBaseline {
  std::vector<std::uint8_t> archive;
  Field decompressed;
  double eb_abs = 0.0;
  double ratio = 0.0;
  std::size_t block_count = 0;
};

TrialBaseline make_baseline(const Field& field, const ErrorBound& bound, const FtConfig& cfg);

/// Compresses and decompresses with the plan's fault armed and classifies the
/// result against the original field. Pipeline failures become outcomes;
/// only an invalid plan throws (InvalidInjection).
TrialOutcome run_trial(const Field& field, const ErrorBound& bound, const FtConfig& cfg, const InjectionPlan& plan,
                       const TrialBaseline* baseline = nullptr);

struct CfgVariant {
  std::string name;
  FtConfig cfg;
};

struct CampaignReport {
  std::size_t trials = 0;
  std::size_t crashes = 0;
  std::size_t bounded = 0;
  std::size_t unbounded = 0;
  std::size_t corrected = 0;
  std::size_t identical = 0;
  double baseline_ratio = 0.0;
  double mean_ratio = 0.0;
  double min_ratio = 0.0;
  std::vector<TrialOutcome> outcomes;

  double percent(std::size_t n) const { return trials ? 100.0 * static_cast<double>(n) / static_cast<double>(trials) : 0.0; }
};

struct CampaignCell {
  InjectionTarget target = InjectionTarget::input_after_checksum;
  ErrorBound bound;
  std::string cfg_name;
  CampaignReport report;
};

struct CampaignSpec {
  std::vector<InjectionTarget> targets;
  std::vector<ErrorBound> bounds;
  std::vector<CfgVariant> variants;
  std::size_t trials = 100;
  std::uint64_t seed = 42;
  int threads = 0;  // trial-level parallelism; each trial runs single-threaded
};

/// Cells are ordered variant-major, then target, then bound.
std::vector<CampaignCell> run_campaign(const Field& field, const CampaignSpec& spec);

/// Seed of trial `trial` in cell `cell`.
std::uint64_t trial_seed(std::uint64_t campaign_seed, std::size_t cell, std::size_t trial);

/// Compression-ratio damage from faults in the unprotected stages (regression
/// fit and predictor selection), k faulted blocks per trial.
struct RatioTrial {
  std::size_t k = 0;
  bool forced = false;  // selection inverted on every faulted block
  double ratio = 0.0;
  double decrease_pct = 0.0;
  double envelope_pct = 0.0;
  bool bounded = false;
};

struct RatioCampaign {
  double r0 = 0.0;
  std::size_t block_count = 0;
  std::vector<RatioTrial> trials;
};

RatioCampaign run_ratio_campaign(const Field& field, const ErrorBound& bound, const FtConfig& cfg, std::size_t max_k,
                                 std::size_t trials_per_k, std::uint64_t seed);

}  // namespace ftlz
