#include "ftlz/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "ftlz/errors.hpp"

namespace ftlz {

namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

// Drops the column padding left at the end of each line.
std::string trim_lines(const std::string& text) {
  std::string out;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::size_t last = end;
    while (last > start && text[last - 1] == ' ') --last;
    out.append(text, start, last - start);
    if (end < text.size()) out.push_back('\n');
    start = end + 1;
  }
  return out;
}

std::string bound_label(const ErrorBound& eb) {
  return (eb.mode == BoundMode::value_range_relative ? "rel " : "abs ") + fmt("%.0e", eb.value);
}

}  // namespace

ReportFormat parse_format(const std::string& name) {
  if (name == "csv") return ReportFormat::csv;
  if (name == "json") return ReportFormat::json;
  if (name == "text" || name == "txt") return ReportFormat::text;
  throw InvalidArgument("unknown report format: " + name);
}

ReportFormat format_for_path(const std::string& path) {
  const auto dot = path.rfind('.');
  if (dot == std::string::npos) return ReportFormat::text;
  const std::string ext = path.substr(dot + 1);
  if (ext == "csv") return ReportFormat::csv;
  if (ext == "json") return ReportFormat::json;
  return ReportFormat::text;
}

nlohmann::json campaign_to_json(const std::vector<CampaignCell>& cells) {
  nlohmann::json out = nlohmann::json::array();
  for (const CampaignCell& c : cells) {
    const CampaignReport& r = c.report;
    nlohmann::json cell = {
        {"target", to_string(c.target)},
        {"eb_mode", c.bound.mode == BoundMode::absolute ? "abs" : "rel"},
        {"eb", c.bound.value},
        {"cfg", c.cfg_name},
        {"trials", r.trials},
        {"bounded", r.bounded},
        {"unbounded", r.unbounded},
        {"crashes", r.crashes},
        {"corrected", r.corrected},
        {"identical_to_clean", r.identical},
        {"baseline_ratio", r.baseline_ratio},
        {"mean_ratio", r.mean_ratio},
        {"min_ratio", r.min_ratio},
    };
    nlohmann::json trials = nlohmann::json::array();
    for (const TrialOutcome& o : r.outcomes)
      trials.push_back({{"block", o.where.block},
                        {"element", o.where.element},
                        {"bit", o.where.bit},
                        {"outcome", to_string(o.cls)},
                        {"fired", o.fired},
                        {"corrected", o.corrected},
                        {"identical_to_clean", o.identical_to_clean},
                        {"max_abs_error", std::isfinite(o.max_abs_error) ? nlohmann::json(o.max_abs_error) : nlohmann::json("inf")},
                        {"ratio", o.ratio},
                        {"diagnostic", o.diagnostic}});
    cell["outcomes"] = std::move(trials);
    out.push_back(std::move(cell));
  }
  return out;
}

std::string render_campaign(const std::vector<CampaignCell>& cells, ReportFormat format) {
  std::ostringstream os;
  switch (format) {
    case ReportFormat::csv:
      os << kCampaignCsvHeader << '\n';
      for (const CampaignCell& c : cells) {
        const CampaignReport& r = c.report;
        os << to_string(c.target) << ',' << fmt("%g", c.bound.value) << ',' << c.cfg_name << ',' << r.trials << ','
           << fmt("%.1f", r.percent(r.bounded)) << ',' << fmt("%.1f", r.percent(r.crashes)) << ','
           << fmt("%.1f", r.percent(r.corrected)) << ',' << fmt("%.4f", r.mean_ratio) << '\n';
      }
      break;
    case ReportFormat::json:
      os << campaign_to_json(cells).dump(2) << '\n';
      break;
    case ReportFormat::text: {
      // Rows are (cfg, target) in first-seen order; columns are bounds.
      std::vector<ErrorBound> bounds;
      std::vector<std::pair<std::string, InjectionTarget>> rows;
      for (const CampaignCell& c : cells) {
        if (std::find(bounds.begin(), bounds.end(), c.bound) == bounds.end()) bounds.push_back(c.bound);
        const std::pair<std::string, InjectionTarget> key{c.cfg_name, c.target};
        if (std::find(rows.begin(), rows.end(), key) == rows.end()) rows.push_back(key);
      }
      os << "Percentage of runs whose maximum absolute error is within the error bound\n";
      os << pad("cfg", 10) << pad("target", 12);
      for (const ErrorBound& eb : bounds) os << pad(bound_label(eb), 12);
      os << '\n';
      for (const auto& [cfg, target] : rows) {
        os << pad(cfg, 10) << pad(to_string(target), 12);
        for (const ErrorBound& eb : bounds) {
          std::string cellText = "-";
          for (const CampaignCell& c : cells)
            if (c.cfg_name == cfg && c.target == target && c.bound == eb)
              cellText = fmt("%.1f%%", c.report.percent(c.report.bounded));
          os << pad(cellText, 12);
        }
        os << '\n';
      }
      return trim_lines(os.str());
    }
  }
  return os.str();
}

nlohmann::json metrics_to_json(const QualityMetrics& m) {
  return {{"max_abs_error", m.max_abs_error},
          {"rmse", m.rmse},
          {"psnr", std::isinf(m.psnr) ? nlohmann::json("inf") : nlohmann::json(m.psnr)},
          {"compression_ratio", m.compression_ratio},
          {"bit_rate", m.bit_rate}};
}

QualityMetrics metrics_from_json(const nlohmann::json& j) {
  QualityMetrics m;
  m.max_abs_error = j.at("max_abs_error").get<double>();
  m.rmse = j.at("rmse").get<double>();
  const auto& p = j.at("psnr");
  m.psnr = p.is_string() ? std::numeric_limits<double>::infinity() : p.get<double>();
  m.compression_ratio = j.at("compression_ratio").get<double>();
  m.bit_rate = j.at("bit_rate").get<double>();
  return m;
}

std::string render_metrics(const QualityMetrics& m, ReportFormat format) {
  const std::string psnr = std::isinf(m.psnr) ? "inf" : fmt("%.4f", m.psnr);
  switch (format) {
    case ReportFormat::csv:
      return "max_abs_error,rmse,psnr,compression_ratio,bit_rate\n" + fmt("%.9g", m.max_abs_error) + "," +
             fmt("%.9g", m.rmse) + "," + psnr + "," + fmt("%.6f", m.compression_ratio) + "," + fmt("%.6f", m.bit_rate) + "\n";
    case ReportFormat::json:
      return metrics_to_json(m).dump(2) + "\n";
    case ReportFormat::text:
      return "max_abs_error  " + fmt("%.9g", m.max_abs_error) + "\nrmse           " + fmt("%.9g", m.rmse) +
             "\npsnr (dB)      " + psnr + "\nratio          " + fmt("%.4f", m.compression_ratio) +
             "\nbit rate       " + fmt("%.4f", m.bit_rate) + "\n";
  }
  return {};
}

void emit_report(const std::string& text, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << text;
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace ftlz
