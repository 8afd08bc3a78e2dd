#pragma once

#include <array>
#include <nlohmann/json.hpp>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vericode/engine/transcript.hpp"

namespace vericode {

/// What analytics needs from one finished game.
struct GameSummary {
  std::string game;  // setup id
  Mode mode = Mode::kClassic;
  Difficulty difficulty = Difficulty::kEasy;
  Strategy strategy = Strategy::kAnswerOnly;
  std::string agent;
  Status status = Status::kInProgress;
  EndReason reason = EndReason::kNone;
  int rounds = 0;
  int queries = 0;
  int format_errors = 0;    // format and missing-reasoning retries
  int illegal_actions = 0;  // invalid verifier numbers
  int infra_retries = 0;
  std::optional<Code> submitted;
  bool operator==(const GameSummary&) const = default;
};

/// Throws FormatError for a transcript without an outcome.
GameSummary summarize(const Transcript& transcript);
nlohmann::json summary_to_json(const GameSummary& s);
GameSummary summary_from_json(const nlohmann::json& j);

struct StratumStats {
  std::size_t games = 0;
  std::size_t wins = 0;
  std::size_t forfeits = 0;
  double accuracy = 0;  // wins / games; forfeits count as losses
  double forfeit_rate = 0;
  std::optional<double> win_avg_turns;      // over won games only
  std::optional<double> win_avg_verifiers;  // queries, over won games only
  long format_errors = 0;
  long illegal_actions = 0;
};

struct MetricsGroup {
  std::string agent;
  Mode mode = Mode::kClassic;
  Strategy strategy = Strategy::kAnswerOnly;
  StratumStats total;
  std::array<std::optional<StratumStats>, 3> by_difficulty;  // easy, medium, hard; absent when empty
};

struct RunMetrics {
  std::vector<MetricsGroup> groups;  // sorted by (agent, mode, strategy)
};

/// Unfinished games are ignored. Order of the input does not matter.
RunMetrics compute_metrics(std::span<const GameSummary> games);

nlohmann::json metrics_to_json(const RunMetrics& m);

}  // namespace vericode
