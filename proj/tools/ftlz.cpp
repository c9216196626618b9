// ftlz command-line front end.
//
// Exit codes: 0 success, 1 usage or I/O error, 2 corrupt archive or SDC in
// compression, 3 uncorrectable corruption during compression.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ftlz/codec.hpp"
#include "ftlz/container.hpp"
#include "ftlz/errors.hpp"
#include "ftlz/faults.hpp"
#include "ftlz/parallel.hpp"
#include "ftlz/pipeline.hpp"
#include "ftlz/raw_io.hpp"
#include "ftlz/report.hpp"

using namespace ftlz;

namespace {

enum Exit { kOk = 0, kUsage = 1, kCorrupt = 2, kUncorrectable = 3 };

std::vector<std::string> split(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

std::size_t to_size(const std::string& s, const char* what) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || s.front() == '-') throw InvalidArgument(std::string("bad ") + what + ": '" + s + "'");
  return static_cast<std::size_t>(v);
}

double to_double(const std::string& s, const char* what) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw InvalidArgument(std::string("bad ") + what + ": '" + s + "'");
  return v;
}

// NX,NY,NZ; two values are a 2D field stored with NX = 1.
Dims parse_dims(const std::string& s) {
  const auto parts = split(s);
  if (parts.size() == 2) return {1, to_size(parts[0], "dims"), to_size(parts[1], "dims")};
  if (parts.size() != 3) throw InvalidArgument("--dims expects NX,NY,NZ");
  return {to_size(parts[0], "dims"), to_size(parts[1], "dims"), to_size(parts[2], "dims")};
}

std::string dims_text(const Dims& d) {
  return std::to_string(d.nx) + "," + std::to_string(d.ny) + "," + std::to_string(d.nz);
}

Region parse_region(const std::string& s) {
  const auto parts = split(s);
  if (parts.size() != 6) throw InvalidRegion("--region expects x0,y0,z0,x1,y1,z1");
  Region r;
  for (int a = 0; a < 3; ++a) {
    r.lo[a] = to_size(parts[a], "region");
    r.hi[a] = to_size(parts[a + 3], "region");
  }
  return r;
}

std::vector<double> parse_list(const std::string& s, const char* what) {
  std::vector<double> out;
  for (const auto& p : split(s)) out.push_back(to_double(p, what));
  if (out.empty()) throw InvalidArgument(std::string("empty ") + what + " list");
  return out;
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string bound_text(const ErrorBound& eb) {
  return (eb.mode == BoundMode::absolute ? "abs:" : "rel:") + fmt("%g", eb.value);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Options shared by the commands that produce a field.
struct Source {
  std::string in;
  std::string synth;
  std::string dims;
  std::uint64_t seed = 42;

  Field load() const {
    if (dims.empty()) throw InvalidArgument("--dims is required");
    const Dims d = parse_dims(dims);
    if (!in.empty()) return read_raw_field(in, d);
    return synth_field(parse_synth_kind(synth.empty() ? "sine" : synth), d, seed);
  }
  std::string describe() const { return in.empty() ? "synth:" + (synth.empty() ? std::string("sine") : synth) : in; }
};

void echo(const std::string& line) { std::cerr << "ftlz " << line << '\n'; }

int report_sdc(const FtReport& r) {
  std::cerr << "ftlz: " << r.diagnostic << '\n';
  return kCorrupt;
}

void print_events(const FtReport& r, const char* stage) {
  for (FtEvent e : {FtEvent::input_corrected, FtEvent::bins_corrected, FtEvent::dup_mismatch_resolved,
                    FtEvent::decomp_block_reexecuted})
    if (r.has(e)) std::cerr << "ftlz: " << stage << ": " << to_string(e) << " x" << r.count(e) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fault-tolerant error-bounded lossy compressor"};
  app.require_subcommand(1);
  app.fallthrough();
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads (0 = logical cores)")->check(CLI::NonNegativeNumber);

  // compress
  auto* cmp = app.add_subcommand("compress", "Compress a raw float32 field");
  Source cmp_src;
  std::string cmp_out, ft = "on";
  std::optional<double> eb_rel, eb_abs;
  std::uint32_t block = static_cast<std::uint32_t>(kDefaultBlockEdge);
  int codec = 0;
  auto* cmp_in = cmp->add_option("--in", cmp_src.in, "Raw little-endian float32 input");
  auto* cmp_syn = cmp->add_option("--synth", cmp_src.synth, "Synthetic field instead of --in");
  cmp_in->excludes(cmp_syn);
  cmp->add_option("--seed", cmp_src.seed, "Seed for --synth");
  cmp->add_option("--dims", cmp_src.dims, "NX,NY,NZ")->required();
  auto* rel = cmp->add_option("--eb-rel", eb_rel, "Value-range-relative error bound");
  auto* ab = cmp->add_option("--eb-abs", eb_abs, "Absolute error bound");
  rel->excludes(ab);
  cmp->add_option("--block", block, "Block edge");
  cmp->add_option("--codec", codec, "Backend codec (0 identity, 1 run-length, 2 deflate)")->check(CLI::Range(0, 255));
  cmp->add_option("--ft", ft, "Fault tolerance")->check(CLI::IsMember({"on", "off"}));
  cmp->add_option("--out", cmp_out, "Archive path")->required();

  // decompress
  auto* dec = app.add_subcommand("decompress", "Decompress an archive");
  std::string dec_in, dec_out, verify, metrics;
  dec->add_option("--in", dec_in)->required();
  dec->add_option("--out", dec_out)->required();
  dec->add_option("--verify-against", verify, "Original raw field to check the bound against");
  dec->add_option("--metrics", metrics, "Write quality metrics (csv/json/txt by extension)");

  // extract
  auto* ext = app.add_subcommand("extract", "Decompress one region");
  std::string ext_in, ext_out, region;
  ext->add_option("--in", ext_in)->required();
  ext->add_option("--region", region, "x0,y0,z0,x1,y1,z1 (half-open)")->required();
  ext->add_option("--out", ext_out)->required();

  // inject
  auto* inj = app.add_subcommand("inject", "Run a fault-injection campaign");
  Source inj_src;
  inj_src.synth = "mixed";
  inj_src.dims = "32,32,32";
  std::string targets = "input,bins", eb_list = "1e-3,1e-4,1e-5,1e-6", eb_mode = "abs", report, json_detail,
              inj_ft = "both";
  std::size_t trials = 100;
  std::uint32_t inj_block = static_cast<std::uint32_t>(kDefaultBlockEdge);
  int inj_codec = 0;
  inj->add_option("--in", inj_src.in)->excludes(inj->add_option("--synth", inj_src.synth));
  inj->add_option("--dims", inj_src.dims);
  inj->add_option("--target", targets, "Comma list of input,bins,regression,sampling,decomp,bytes");
  inj->add_option("--trials", trials)->check(CLI::PositiveNumber);
  inj->add_option("--eb", eb_list, "Comma list of error bounds");
  inj->add_option("--eb-mode", eb_mode)->check(CLI::IsMember({"abs", "rel"}));
  inj->add_option("--seed", inj_src.seed);
  inj->add_option("--block", inj_block);
  inj->add_option("--codec", inj_codec)->check(CLI::Range(0, 255));
  inj->add_option("--ft", inj_ft)->check(CLI::IsMember({"on", "off", "both"}));
  inj->add_option("--report", report, "Campaign table (csv/json/txt by extension)");
  inj->add_option("--json", json_detail, "Per-trial JSON detail");

  // bench
  auto* bench = app.add_subcommand("bench", "Rate-distortion and timing sweep");
  Source bench_src;
  bench_src.synth = "sine";
  bench_src.dims = "64,64,64";
  std::string bench_eb = "1e-3,1e-4,1e-5,1e-6", bench_ft = "both", bench_report;
  bench->add_option("--in", bench_src.in)->excludes(bench->add_option("--synth", bench_src.synth));
  bench->add_option("--dims", bench_src.dims);
  bench->add_option("--seed", bench_src.seed);
  bench->add_option("--eb-list", bench_eb, "Comma list of absolute error bounds");
  bench->add_option("--ft", bench_ft)->check(CLI::IsMember({"on", "off", "both"}));
  bench->add_option("--block", block);
  bench->add_option("--codec", codec)->check(CLI::Range(0, 255));
  bench->add_option("--report", bench_report, "CSV output");

  // info
  auto* info = app.add_subcommand("info", "Print an archive summary");
  std::string info_in;
  bool info_json = false;
  info->add_option("--in", info_in)->required();
  info->add_flag("--json", info_json, "JSON instead of text");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*cmp) {
      if (!eb_rel && !eb_abs) throw InvalidArgument("one of --eb-rel or --eb-abs is required");
      if (cmp_src.in.empty() && cmp_src.synth.empty()) throw InvalidArgument("one of --in or --synth is required");
      const ErrorBound eb = eb_rel ? ErrorBound::relative(*eb_rel) : ErrorBound::absolute(*eb_abs);
      if (codec < 0 || codec > 255) throw UnsupportedCodec("codec id " + std::to_string(codec) + " is not registered");
      FtConfig cfg = ft == "on" ? FtConfig{} : FtConfig::unprotected();
      cfg.block_edge = block;
      cfg.codec = static_cast<std::uint8_t>(codec);
      cfg.threads = resolve_threads(threads);
      echo("compress in=" + cmp_src.describe() + " dims=" + cmp_src.dims + " eb=" + bound_text(eb) +
           " block=" + std::to_string(block) + " codec=" + std::to_string(codec) + " ft=" + ft +
           " threads=" + std::to_string(cfg.threads) + (cmp_src.in.empty() ? " seed=" + std::to_string(cmp_src.seed) : "") +
           " out=" + cmp_out);
      const Field f = cmp_src.load();
      const auto t0 = std::chrono::steady_clock::now();
      const CompressResult c = compress(f, eb, cfg);
      const auto bytes = serialize(c.stream);
      const double secs = seconds_since(t0);
      write_bytes(cmp_out, bytes);
      print_events(c.report, "compress");
      std::cerr << "ftlz: " << bytes.size() << " bytes, ratio " << fmt("%.4f", 4.0 * f.size() / bytes.size())
                << ", eb_abs " << fmt("%g", c.stream.header.eb_abs) << ", " << fmt("%.3f", secs) << " s\n";
      return kOk;
    }

    if (*dec) {
      echo("decompress in=" + dec_in + " out=" + dec_out + " threads=" + std::to_string(resolve_threads(threads)) +
           (verify.empty() ? "" : " verify-against=" + verify));
      if (!metrics.empty() && verify.empty()) throw InvalidArgument("--metrics needs --verify-against");
      const auto bytes = read_bytes(dec_in);
      const CompressedStream s = parse(bytes);
      DecompressResult d = decompress(s, {resolve_threads(threads), nullptr});
      print_events(d.report, "decompress");
      if (!d.field) return report_sdc(d.report);
      write_raw_field(dec_out, *d.field);
      if (!verify.empty()) {
        const Field orig = read_raw_field(verify, s.header.dims);
        const QualityMetrics m = compute_metrics(orig, *d.field, bytes.size());
        const bool ok = m.max_abs_error <= s.header.eb_abs;
        std::cerr << "ftlz: verify max_abs_error " << fmt("%.9g", m.max_abs_error) << (ok ? " <= " : " > ")
                  << "eb " << fmt("%g", s.header.eb_abs) << (ok ? " (ok)" : " (BOUND VIOLATED)") << '\n';
        if (!metrics.empty()) emit_report(render_metrics(m, format_for_path(metrics)), metrics);
        if (!ok) return kCorrupt;
      }
      return kOk;
    }

    if (*ext) {
      echo("extract in=" + ext_in + " region=" + region + " out=" + ext_out +
           " threads=" + std::to_string(resolve_threads(threads)));
      const Region r = parse_region(region);
      const CompressedStream s = parse(read_bytes(ext_in));
      DecompressResult d = decompress_region(s, r, {resolve_threads(threads), nullptr});
      print_events(d.report, "extract");
      if (!d.field) return report_sdc(d.report);
      write_raw_field(ext_out, *d.field);
      std::cerr << "ftlz: decoded " << d.blocks_decoded << " of " << s.blocks.size() << " blocks\n";
      return kOk;
    }

    if (*inj) {
      CampaignSpec spec;
      for (const auto& t : split(targets)) spec.targets.push_back(parse_target(t));
      for (double v : parse_list(eb_list, "--eb"))
        spec.bounds.push_back(eb_mode == "abs" ? ErrorBound::absolute(v) : ErrorBound::relative(v));
      FtConfig on, off = FtConfig::unprotected();
      for (FtConfig* c : {&on, &off}) {
        c->block_edge = inj_block;
        c->codec = static_cast<std::uint8_t>(inj_codec);
      }
      if (inj_ft != "off") spec.variants.push_back({"ftrsz", on});
      if (inj_ft != "on") spec.variants.push_back({"rsz", off});
      spec.trials = trials;
      spec.seed = inj_src.seed;
      spec.threads = resolve_threads(threads);
      echo("inject in=" + inj_src.describe() + " dims=" + inj_src.dims + " target=" + targets + " eb=" + eb_mode + ":" +
           eb_list + " ft=" + inj_ft + " trials=" + std::to_string(trials) + " seed=" + std::to_string(inj_src.seed) +
           " block=" + std::to_string(inj_block) + " codec=" + std::to_string(inj_codec) +
           " threads=" + std::to_string(spec.threads));
      // Synthetic campaign fields use a fixed seed so --seed only drives the faults.
      Source src = inj_src;
      src.seed = 1;
      const Field f = src.load();
      const auto cells = run_campaign(f, spec);
      if (!report.empty()) emit_report(render_campaign(cells, format_for_path(report)), report);
      if (!json_detail.empty()) emit_report(campaign_to_json(cells).dump(2) + "\n", json_detail);
      std::cout << render_campaign(cells, ReportFormat::text);
      return kOk;
    }

    if (*bench) {
      const int nthreads = resolve_threads(threads);
      echo("bench in=" + bench_src.describe() + " dims=" + bench_src.dims + " eb-list=" + bench_eb + " ft=" + bench_ft +
           " block=" + std::to_string(block) + " codec=" + std::to_string(codec) +
           " threads=" + std::to_string(nthreads));
      const Field f = bench_src.load();
      std::vector<std::pair<std::string, FtConfig>> variants;
      if (bench_ft != "off") variants.push_back({"ftrsz", FtConfig{}});
      if (bench_ft != "on") variants.push_back({"rsz", FtConfig::unprotected()});
      std::ostringstream csv;
      csv << "eb,cfg,bytes,ratio,bit_rate,psnr,max_abs_error,compress_s,decompress_s\n";
      for (double v : parse_list(bench_eb, "--eb-list"))
        for (auto& [name, cfg] : variants) {
          cfg.block_edge = block;
          cfg.codec = static_cast<std::uint8_t>(codec);
          cfg.threads = nthreads;
          const auto t0 = std::chrono::steady_clock::now();
          const CompressResult c = compress(f, ErrorBound::absolute(v), cfg);
          const auto bytes = serialize(c.stream);
          const double tc = seconds_since(t0);
          const auto t1 = std::chrono::steady_clock::now();
          const DecompressResult d = decompress(c.stream, {nthreads, nullptr});
          const double td = seconds_since(t1);
          if (!d.field) return report_sdc(d.report);
          const QualityMetrics m = compute_metrics(f, *d.field, bytes.size());
          csv << fmt("%g", v) << ',' << name << ',' << bytes.size() << ',' << fmt("%.4f", m.compression_ratio) << ','
              << fmt("%.4f", m.bit_rate) << ',' << (std::isinf(m.psnr) ? std::string("inf") : fmt("%.3f", m.psnr)) << ','
              << fmt("%.6g", m.max_abs_error) << ',' << fmt("%.4f", tc) << ',' << fmt("%.4f", td) << '\n';
        }
      if (!bench_report.empty()) emit_report(csv.str(), bench_report);
      std::cout << csv.str();
      return kOk;
    }

    if (*info) {
      const auto bytes = read_bytes(info_in);
      const CompressedStream s = parse(bytes);
      const auto& h = s.header;
      std::size_t regression = 0, unpredictable = 0;
      std::uint64_t bits = 0;
      for (const auto& b : s.blocks) {
        regression += b.predictor == PredictorKind::regression;
        unpredictable += b.unpredictable_count;
        bits += b.bit_length;
      }
      const double ratio = 4.0 * static_cast<double>(h.dims.volume()) / static_cast<double>(bytes.size());
      if (info_json) {
        nlohmann::json j = {{"version", kFormatVersion},
                            {"codec", codec_name(h.codec)},
                            {"dims", {h.dims.nx, h.dims.ny, h.dims.nz}},
                            {"block_edge", h.block_edge},
                            {"eb_mode", h.bound.mode == BoundMode::absolute ? "abs" : "rel"},
                            {"eb_value", h.bound.value},
                            {"eb_abs", h.eb_abs},
                            {"bin_capacity", h.bin_capacity},
                            {"blocks", h.block_count},
                            {"regression_blocks", regression},
                            {"unpredictable_values", unpredictable},
                            {"codebook_symbols", s.codebook.size()},
                            {"payload_bits", bits},
                            {"payload_bytes", s.payload.size()},
                            {"sum_dc", s.has_sum_dc()},
                            {"archive_bytes", bytes.size()},
                            {"ratio", ratio}};
        std::cout << j.dump(2) << '\n';
      } else {
        std::cout << "format        FTLZ v" << int(kFormatVersion) << "\n"
                  << "codec         " << codec_name(h.codec) << " (" << int(h.codec) << ")\n"
                  << "dims          " << dims_text(h.dims) << "\n"
                  << "block edge    " << h.block_edge << "\n"
                  << "error bound   " << bound_text(h.bound) << " (abs " << fmt("%g", h.eb_abs) << ")\n"
                  << "bin capacity  " << h.bin_capacity << "\n"
                  << "blocks        " << h.block_count << " (" << regression << " regression, "
                  << h.block_count - regression << " lorenzo)\n"
                  << "unpredictable " << unpredictable << "\n"
                  << "codebook      " << s.codebook.size() << " symbols\n"
                  << "payload       " << bits << " bits, " << s.payload.size() << " bytes stored\n"
                  << "sum_dc        " << (s.has_sum_dc() ? "present" : "absent") << "\n"
                  << "archive       " << bytes.size() << " bytes, ratio " << fmt("%.4f", ratio) << "\n";
      }
      return kOk;
    }
  } catch (const UncorrectableCorruption& e) {
    std::cerr << "ftlz: uncorrectable corruption: " << e.what() << '\n';
    return kUncorrectable;
  } catch (const CorruptStream& e) {
    std::cerr << "ftlz: corrupt archive: " << e.what() << '\n';
    return kCorrupt;
  } catch (const InternalInvariantViolation& e) {
    std::cerr << "ftlz: internal invariant violated: " << e.what() << '\n';
    return kCorrupt;
  } catch (const Error& e) {
    std::cerr << "ftlz: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "ftlz: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
