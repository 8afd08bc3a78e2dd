#pragma once

#include <string>
#include <string_view>

#include "vericode/analytics/error_paths.hpp"
#include "vericode/analytics/metrics.hpp"

namespace vericode {

enum class ExportFormat { kCsv, kTsv, kJson };

/// "csv", "tsv" or "json"; ConfigError otherwise.
ExportFormat parse_export_format(std::string_view text);

// Column sets are fixed:
//   metrics:     agent,mode,strategy,difficulty,games,wins,accuracy,win_avg_turns,
//                win_avg_verifiers,forfeits,forfeit_rate,format_errors,illegal_actions
//   table4:      field,numerator,denominator,value
//   flow:        stage_from,stage_to,count
//   persistence: k,probability,denominator
// Absent values are empty cells (null in JSON).
std::string export_metrics(const RunMetrics& m, ExportFormat format);
std::string export_table4(const ErrorPathStats& s, ExportFormat format);
std::string export_flow(const ErrorPathStats& s, ExportFormat format);
std::string export_persistence(const ErrorPathStats& s, ExportFormat format);

}  // namespace vericode
