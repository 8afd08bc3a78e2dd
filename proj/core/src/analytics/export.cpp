#include "vericode/analytics/export.hpp"

#include <cstdio>

#include "vericode/util/error.hpp"

namespace vericode {

ExportFormat parse_export_format(std::string_view text) {
  if (text == "csv") return ExportFormat::kCsv;
  if (text == "tsv") return ExportFormat::kTsv;
  if (text == "json") return ExportFormat::kJson;
  throw ConfigError("unknown export format '" + std::string(text) + "' (csv, tsv, json)");
}

namespace {

// Cells are nullopt (absent), numbers or plain identifiers; none needs quoting.
using Cell = std::optional<nlohmann::json>;

std::string cell_text(const Cell& c) {
  if (!c || c->is_null()) return "";
  if (c->is_string()) return c->get<std::string>();
  if (c->is_number_float()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", c->get<double>());
    return buf;
  }
  return c->dump();
}

std::string table(const std::vector<std::string>& columns, const std::vector<std::vector<Cell>>& rows,
                  ExportFormat format) {
  if (format == ExportFormat::kJson) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : rows) {
      nlohmann::json o = nlohmann::json::object();
      for (std::size_t i = 0; i < columns.size(); ++i) o[columns[i]] = r[i] ? *r[i] : nlohmann::json();
      out.push_back(std::move(o));
    }
    return out.dump(2) + "\n";
  }
  const char sep = format == ExportFormat::kCsv ? ',' : '\t';
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? std::string(1, sep) : "") + columns[i];
  out += '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out += (i ? std::string(1, sep) : "") + cell_text(r[i]);
    out += '\n';
  }
  return out;
}

Cell opt(const std::optional<double>& v) { return v ? Cell(*v) : Cell(); }

}  // namespace

std::string export_metrics(const RunMetrics& m, ExportFormat format) {
  std::vector<std::vector<Cell>> rows;
  for (const auto& g : m.groups) {
    auto row = [&](std::string diff, const StratumStats& s) {
      rows.push_back({g.agent, std::string(mode_name(g.mode)), std::string(strategy_name(g.strategy)),
                      std::move(diff), s.games, s.wins, s.accuracy, opt(s.win_avg_turns),
                      opt(s.win_avg_verifiers), s.forfeits, s.forfeit_rate, s.format_errors,
                      s.illegal_actions});
    };
    row("total", g.total);
    for (std::size_t d = 0; d < 3; ++d) {
      if (g.by_difficulty[d]) row(std::string(difficulty_name(static_cast<Difficulty>(d))), *g.by_difficulty[d]);
    }
  }
  return table({"agent", "mode", "strategy", "difficulty", "games", "wins", "accuracy", "win_avg_turns",
                "win_avg_verifiers", "forfeits", "forfeit_rate", "format_errors", "illegal_actions"},
               rows, format);
}

std::string export_table4(const ErrorPathStats& s, ExportFormat format) {
  std::vector<std::vector<Cell>> rows;
  rows.push_back({"initial_verifier_errors", s.initial_verifier_errors, Cell(), Cell()});
  auto add = [&](std::string name, const Rate& r) {
    rows.push_back({std::move(name), r.numerator, r.denominator, opt(r.value())});
  };
  add("persistence_rate", s.persistence);
  add("no_final_conclusion_rate", s.no_final_conclusion);
  add("next_turn_still_incorrect_rate", s.next_turn_still_incorrect);
  add("success_despite_persistent_errors", s.success_despite_persistent);
  add("success_when_no_or_fixed_errors", s.success_when_no_or_fixed);
  return table({"field", "numerator", "denominator", "value"}, rows, format);
}

std::string export_flow(const ErrorPathStats& s, ExportFormat format) {
  std::vector<std::vector<Cell>> rows;
  for (const auto& e : s.flow) rows.push_back({e.from, e.to, e.count});
  return table({"stage_from", "stage_to", "count"}, rows, format);
}

std::string export_persistence(const ErrorPathStats& s, ExportFormat format) {
  std::vector<std::vector<Cell>> rows;
  for (const auto& p : s.persistence_curve) rows.push_back({p.k, p.probability(), p.denominator});
  return table({"k", "probability", "denominator"}, rows, format);
}

}  // namespace vericode
