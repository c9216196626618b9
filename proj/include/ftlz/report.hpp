#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ftlz/core.hpp"
#include "ftlz/faults.hpp"

namespace ftlz {

enum class ReportFormat { csv, json, text };

ReportFormat parse_format(const std::string& name);
/// Format implied by a file extension; text when unrecognized.
ReportFormat format_for_path(const std::string& path);

/// Header of the campaign CSV, in column order.
inline constexpr const char* kCampaignCsvHeader = "target,eb,cfg,trials,bounded%,crash%,corrected%,mean_ratio";

std::string render_campaign(const std::vector<CampaignCell>& cells, ReportFormat format);
std::string render_metrics(const QualityMetrics& m, ReportFormat format);

/// Infinite PSNR is written as the string "inf".
nlohmann::json metrics_to_json(const QualityMetrics& m);
QualityMetrics metrics_from_json(const nlohmann::json& j);

nlohmann::json campaign_to_json(const std::vector<CampaignCell>& cells);

/// Writes `text` to `path`; throws IoError.
void emit_report(const std::string& text, const std::string& path);

}  // namespace ftlz
