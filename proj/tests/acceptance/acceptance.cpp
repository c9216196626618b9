// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "ftlz/checksum.hpp"
#include "ftlz/errors.hpp"
#include "ftlz/faults.hpp"
#include "ftlz/parallel.hpp"
#include "ftlz/pipeline.hpp"
#include "ftlz/report.hpp"

using namespace ftlz;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void verdict(bool ok, const char* id, const std::string& what, const std::string& detail) {
  std::printf("[%s] %s %s: %s\n", ok ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* spec, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

bool same_bits(const Field& a, const Field& b) {
  if (a.dims() != b.dims()) return false;
  for (std::size_t n = 0; n < a.size(); ++n)
    if (std::bit_cast<std::uint32_t>(a.values()[n]) != std::bit_cast<std::uint32_t>(b.values()[n])) return false;
  return true;
}

// Zero-tolerance point check in exact double arithmetic; NaN counts as a miss.
bool within(const Field& a, const Field& b, double eb) {
  for (std::size_t n = 0; n < a.size(); ++n) {
    const double e = std::abs(static_cast<double>(a.values()[n]) - static_cast<double>(b.values()[n]));
    if (!(e <= eb)) return false;
  }
  return true;
}

const double kBounds[] = {1e-3, 1e-4, 1e-5, 1e-6};

void ac1() {
  const auto t0 = Clock::now();
  std::size_t runs = 0, ok = 0;
  for (auto kind : {SynthKind::sine, SynthKind::noise, SynthKind::mixed}) {
    const Field f = synth_field(kind, {64, 64, 64}, 2024);
    for (double eb : kBounds) {
      const auto c = compress(f, ErrorBound::absolute(eb), FtConfig{});
      const auto d = decompress(parse(serialize(c.stream)));
      ++runs;
      if (d.field && within(f, *d.field, eb)) ++ok;
    }
  }
  const double secs = since(t0);
  verdict(ok == runs && secs < 10.0, "AC1", "error-bound guarantee",
          std::to_string(ok) + "/" + std::to_string(runs) + " runs within eb, " + fmt("%.2f s", secs) + " (< 10 s)");
}

void ac2() {
  const Field f = synth_field(SynthKind::mixed, {64, 64, 64}, 7);
  CampaignSpec on;
  on.targets = {InjectionTarget::input_after_checksum, InjectionTarget::bin_array};
  for (double eb : kBounds) on.bounds.push_back(ErrorBound::absolute(eb));
  on.variants = {{"ftrsz", FtConfig{}}};
  on.trials = 100;
  on.seed = 42;
  const auto cells = run_campaign(f, on);
  bool ok_on = true;
  std::size_t trials = 0, bounded = 0, identical = 0, crashes = 0;
  for (const auto& c : cells) {
    trials += c.report.trials;
    bounded += c.report.bounded;
    identical += c.report.identical;
    crashes += c.report.crashes;
    ok_on = ok_on && c.report.bounded == c.report.trials && c.report.crashes == 0 && c.report.identical == c.report.trials;
  }

  CampaignSpec off = on;
  off.targets = {InjectionTarget::bin_array};
  off.variants = {{"rsz", FtConfig::unprotected()}};
  const auto off_cells = run_campaign(f, off);
  bool ok_off = true;
  std::string floor;
  for (const auto& c : off_cells) {
    const std::size_t bad = c.report.unbounded + c.report.crashes;
    ok_off = ok_off && bad >= 1;
    floor += (floor.empty() ? "" : ",") + std::to_string(bad);
  }
  verdict(ok_on && ok_off, "AC2", "injection campaign, protected vs unprotected",
          "ftrsz " + std::to_string(bounded) + "/" + std::to_string(trials) + " bounded, " + std::to_string(identical) +
              " identical, " + std::to_string(crashes) + " crashes; rsz bins non-bounded per eb [" + floor + "]/100");
}

void ac3() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(31337);
  std::size_t detected = 0, located = 0, restored = 0;
  const std::size_t trials = 10000;
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t len = 1 + rng() % 1000;
    if (t % 2 == 0) {
      std::vector<float> pristine(len);
      for (auto& v : pristine) v = std::bit_cast<float>(static_cast<std::uint32_t>(rng()));
      const ChecksumPair ck = checksum_block(pristine);
      auto work = pristine;
      const std::size_t e = rng() % len;
      const unsigned bit = static_cast<unsigned>(rng() % 32);
      inject_bitflip(std::span<float>(work), e, bit);
      if (verify_block(std::span<const float>(work), ck) == Integrity::corrupted) ++detected;
      const auto fix = locate_and_correct(std::span<float>(work), ck);
      if (fix.status == CorrectionStatus::corrected && fix.index == e) ++located;
      if (std::equal(work.begin(), work.end(), pristine.begin(), [](float a, float b) {
            return std::bit_cast<std::uint32_t>(a) == std::bit_cast<std::uint32_t>(b);
          }))
        ++restored;
    } else {
      std::vector<double> pristine(len);
      for (auto& v : pristine) v = std::bit_cast<double>(rng());
      const ChecksumPair ck = checksum_block_f64(pristine);
      auto work = pristine;
      const std::size_t e = rng() % len;
      const unsigned bit = static_cast<unsigned>(rng() % 64);
      inject_bitflip(std::span<double>(work), e, bit);
      if (verify_block(std::span<const double>(work), ck) == Integrity::corrupted) ++detected;
      const auto fix = locate_and_correct(std::span<double>(work), ck);
      if (fix.status == CorrectionStatus::corrected && fix.index == 2 * e + (bit >= 32 ? 1 : 0)) ++located;
      if (std::equal(work.begin(), work.end(), pristine.begin(), [](double a, double b) {
            return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
          }))
        ++restored;
    }
  }
  const double secs = since(t0);
  verdict(detected == trials && located == trials && restored == trials && secs < 5.0, "AC3", "checksum correction",
          std::to_string(detected) + " detected, " + std::to_string(located) + " located, " + std::to_string(restored) +
              " restored of " + std::to_string(trials) + ", " + fmt("%.2f s", secs) + " (< 5 s)");
}

void ac4() {
  const double pct = cr_decrease_bound(10.0, 1000000);
  const double oracle = (10.0 - 1.0) / (10.0 + 1000000.0 - 1.0);
  const bool formula = pct / 100.0 < 0.001 && std::abs(pct / 100.0 - oracle) <= 1e-15 && pct < 0.1;

  const Field f = synth_field(SynthKind::sine, {64, 64, 64}, 11);
  const auto rc = run_ratio_campaign(f, ErrorBound::absolute(1e-3), FtConfig{}, 10, 5, 2024);
  std::size_t within_env = 0, bounded = 0;
  double worst_margin = -1e300, worst_decrease = 0.0;
  for (const auto& t : rc.trials) {
    if (t.decrease_pct <= t.envelope_pct) ++within_env;
    if (t.bounded) ++bounded;
    worst_margin = std::max(worst_margin, t.decrease_pct - t.envelope_pct);
    worst_decrease = std::max(worst_decrease, t.decrease_pct);
  }
  const bool campaign = within_env == rc.trials.size() && bounded == rc.trials.size();
  verdict(formula && campaign, "AC4", "compression-ratio decrease bound",
          "cr_decrease_bound(10,1e6) = " + fmt("%.3e", pct / 100.0) + " (< 0.001); r0 " + fmt("%.3f", rc.r0) + ", " +
              std::to_string(within_env) + "/" + std::to_string(rc.trials.size()) + " trials within k-block envelope, " +
              std::to_string(bounded) + " bounded, max decrease " + fmt("%.4f%%", worst_decrease) +
              ", worst margin " + fmt("%+.4f pp", worst_margin));
}

void ac5() {
  bool exact = true, small = true, decreasing = true;
  std::string detail;
  for (auto kind : {SynthKind::sine, SynthKind::mixed, SynthKind::noise}) {
    const Field f = synth_field(kind, {64, 64, 64}, 5);
    double prev = 1e300;
    std::string row;
    for (double eb : kBounds) {
      const auto on = compress(f, ErrorBound::absolute(eb), FtConfig{});
      const auto off = compress(f, ErrorBound::absolute(eb), FtConfig::unprotected());
      const auto a = serialize(on.stream).size();
      const auto b = serialize(off.stream).size();
      exact = exact && on.stream.sum_dc_raw_length == 8 * on.stream.header.block_count &&
              a - b == 8 * on.stream.header.block_count;
      const double infl = 100.0 * (static_cast<double>(a) - static_cast<double>(b)) / static_cast<double>(b);
      if (eb == 1e-3) small = small && infl <= 12.0;
      decreasing = decreasing && infl < prev;
      prev = infl;
      row += (row.empty() ? "" : "/") + fmt("%.3f", infl);
    }
    const char* names[] = {"constant", "linear", "sine", "noise", "mixed"};
    detail += std::string(detail.empty() ? "" : "; ") + names[static_cast<int>(kind)] + " " + row + "%";
  }
  verdict(exact && small && decreasing, "AC5", "FT storage overhead",
          std::string(exact ? "8 bytes/block exact" : "8 bytes/block MISMATCH") + "; inflation at 1e-3..1e-6: " + detail);
}

void ac6() {
  const Field f = synth_field(SynthKind::mixed, {80, 80, 80}, 3);
  const auto c = compress(f, ErrorBound::absolute(1e-4), FtConfig{});
  const auto full = decompress(c.stream);
  bool ok = full.field.has_value();
  const Region regions[] = {{{0, 0, 0}, {80, 80, 80}},
                            {{0, 0, 0}, {40, 80, 80}},
                            {{20, 40, 0}, {60, 80, 80}},
                            {{40, 0, 40}, {80, 40, 80}}};
  const std::size_t expected[] = {512, 256, 128, 64};
  std::string counts;
  for (int r = 0; r < 4 && ok; ++r) {
    const auto part = decompress_region(c.stream, regions[r]);
    counts += (counts.empty() ? "" : ",") + std::to_string(part.blocks_decoded);
    ok = ok && part.field && part.blocks_decoded == expected[r] &&
         part.field->size() * expected[0] == f.size() * expected[r];
    if (!ok) break;
    const Region& g = regions[r];
    for (std::size_t i = g.lo[0]; i < g.hi[0] && ok; ++i)
      for (std::size_t j = g.lo[1]; j < g.hi[1] && ok; ++j)
        for (std::size_t k = g.lo[2]; k < g.hi[2]; ++k)
          if (std::bit_cast<std::uint32_t>(part.field->at(i - g.lo[0], j - g.lo[1], k - g.lo[2])) !=
              std::bit_cast<std::uint32_t>(full.field->at(i, j, k))) {
            ok = false;
            break;
          }
  }
  verdict(ok, "AC6", "random-access decompression",
          "fractions 1,1/2,1/4,1/8 decoded [" + counts + "] blocks (expected 512,256,128,64), slices bit-identical");
}

void ac7() {
  const Field f = synth_field(SynthKind::sine, {40, 40, 40}, 9);
  const auto c = compress(f, ErrorBound::absolute(1e-4), FtConfig{});
  const auto clean = decompress(c.stream);

  FaultHooks hooks;
  hooks.decompressed = [](std::size_t b, int attempt, std::span<float> out) {
    if (b == 13 && attempt == 0) inject_bitflip(out, 321, 17);
  };
  const auto fixed = decompress(c.stream, {0, &hooks});
  const bool hook_ok = clean.field && fixed.field && same_bits(*clean.field, *fixed.field) &&
                       fixed.report.count(FtEvent::decomp_block_reexecuted) == 1 &&
                       fixed.report.status == FtStatus::corrected;

  const auto archive = serialize(c.stream);
  const auto sec = payload_section(archive);
  const std::size_t positions = 1000;
  std::size_t sdc = 0, withheld = 0, crashes = 0;
  for (std::size_t p = 0; p < positions; ++p) {
    auto bad = archive;
    bad[sec.offset + p * sec.size / positions] ^= 0xFF;
    try {
      const auto d = decompress(parse(bad));
      if (d.report.status == FtStatus::sdc_in_compression &&
          d.report.diagnostic.find("SDC in compression") != std::string::npos)
        ++sdc;
      if (!d.field) ++withheld;
    } catch (...) {
      ++crashes;
    }
  }
  verdict(hook_ok && sdc == positions && withheld == positions && crashes == 0 && sec.size >= positions, "AC7",
          "decompression fault tolerance",
          std::string("hook corruption ") + (hook_ok ? "re-executed and bit-identical" : "NOT recovered") + "; " +
              std::to_string(sdc) + "/" + std::to_string(positions) + " payload-byte corruptions reported SDC, " +
              std::to_string(withheld) + " withheld, " + std::to_string(crashes) + " crashes");
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

void ac8() {
  const Field big = synth_field(SynthKind::mixed, {128, 128, 128}, 8);
  const auto eb = ErrorBound::absolute(1e-4);
  auto roundtrip = [&](const Field& f, const FtConfig& cfg, const FaultHooks* hooks) {
    const auto t0 = Clock::now();
    const auto c = compress(f, eb, cfg, hooks);
    const auto d = decompress(parse(serialize(c.stream)), {cfg.threads, hooks});
    const double s = since(t0);
    if (!d.field) throw InternalInvariantViolation("timing run failed verification");
    return s;
  };
  std::vector<double> ft, plain;
  for (int r = 0; r < 5; ++r) {
    plain.push_back(roundtrip(big, FtConfig::unprotected(), nullptr));
    ft.push_back(roundtrip(big, FtConfig{}, nullptr));
  }
  const double slowdown = median(ft) / median(plain);

  const Field mid = synth_field(SynthKind::mixed, {64, 64, 64}, 8);
  FaultHooks inject;
  std::size_t next = 0;
  inject.input_after_checksum = [&](std::size_t b, std::span<float> in) {
    if (b == next % 216) inject_bitflip(in, (next * 37) % in.size(), static_cast<unsigned>(next % 32));
  };
  // Adjacent pairs in alternating order, so drifts in machine speed cancel
  // within each ratio.
  std::vector<double> ratios;
  for (int r = 0; r < 41; ++r) {
    double clean, hit;
    if (r % 2 == 0) {
      clean = roundtrip(mid, FtConfig{}, nullptr);
      hit = roundtrip(mid, FtConfig{}, &inject);
    } else {
      hit = roundtrip(mid, FtConfig{}, &inject);
      clean = roundtrip(mid, FtConfig{}, nullptr);
    }
    ratios.push_back(hit / clean);
    ++next;
  }
  const double overhead = 100.0 * (median(ratios) - 1.0);
  verdict(slowdown <= 2.0 && overhead < 5.0, "AC8", "timing guards",
          "128^3 ftrsz/rsz wall time " + fmt("%.3f", slowdown) + "x (<= 2x, median " + fmt("%.3f", median(ft)) + " s vs " +
              fmt("%.3f", median(plain)) + " s); injected-trial overhead " + fmt("%+.2f%%", overhead) + " (< 5%)");
}

void ac9() {
  const Field f = synth_field(SynthKind::mixed, {50, 60, 70}, 4);
  const int n = std::max(4, resolve_threads(0));
  std::vector<std::vector<std::uint8_t>> archives;
  std::vector<std::string> reports;
  std::vector<Field> outputs;
  for (int t : {1, 2, n}) {
    FtConfig cfg;
    cfg.codec = 2;
    cfg.threads = t;
    FaultHooks hooks;
    hooks.bins_finalized = [](std::size_t b, std::span<std::uint32_t> bins) {
      if (b % 17 == 3) inject_bitflip(bins, b % bins.size(), static_cast<unsigned>(b % 32));
    };
    const auto c = compress(f, ErrorBound::relative(1e-5), cfg, &hooks);
    archives.push_back(serialize(c.stream));
    const auto d = decompress(c.stream, {t, nullptr});
    outputs.push_back(d.field ? *d.field : Field({1, 1, 1}));

    CampaignSpec spec;
    spec.targets = {InjectionTarget::input_after_checksum, InjectionTarget::bin_array, InjectionTarget::sampling};
    spec.bounds = {ErrorBound::absolute(1e-3), ErrorBound::absolute(1e-5)};
    spec.variants = {{"ftrsz", FtConfig{}}, {"rsz", FtConfig::unprotected()}};
    spec.trials = 10;
    spec.seed = 99;
    spec.threads = t;
    const auto cells = run_campaign(synth_field(SynthKind::sine, {24, 24, 24}, 1), spec);
    std::string events;
    for (const auto& e : c.report.events) events += std::to_string(e.block) + ":" + to_string(e.event) + ";";
    reports.push_back(render_campaign(cells, ReportFormat::csv) + campaign_to_json(cells).dump() + events);
  }
  bool ok = true;
  for (std::size_t r = 1; r < archives.size(); ++r)
    ok = ok && archives[r] == archives[0] && reports[r] == reports[0] && same_bits(outputs[r], outputs[0]);
  verdict(ok, "AC9", "determinism across thread counts",
          "archives, decompressed output and campaign reports byte-identical at 1, 2, " + std::to_string(n) +
              " threads (" + std::to_string(archives[0].size()) + "-byte archive)");
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<void()>> criteria[] = {
      {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4}, {"AC5", ac5},
      {"AC6", ac6}, {"AC7", ac7}, {"AC8", ac8}, {"AC9", ac9},
  };
  for (const auto& [id, run] : criteria) {
    try {
      run();
    } catch (const std::exception& e) {
      verdict(false, id, "threw", e.what());
    }
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
