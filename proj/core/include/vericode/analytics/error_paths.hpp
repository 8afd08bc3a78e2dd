#pragma once

#include <nlohmann/json.hpp>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vericode/analytics/metrics.hpp"
#include "vericode/eval/judgment.hpp"

namespace vericode {

/// The walk from one verifier's first incorrect conclusion to the game end.
struct FicPath {
  std::string game;
  int verifier = 0;
  int fic_round = 0;
  std::optional<Category> next;  // NCS; nullopt: no subsequent conclusion
  Category before_submit = Category::kIncorrect;  // CSBS
  Status outcome = Status::kLost;                 // GS

  bool persistent() const { return before_submit != Category::kCorrect; }
};

struct FlowEdge {
  std::string from;
  std::string to;
  std::size_t count = 0;
  bool operator==(const FlowEdge&) const = default;
};

/// numerator / denominator; the value is absent for an empty denominator.
struct Rate {
  std::size_t numerator = 0;
  std::size_t denominator = 0;
  std::optional<double> value() const {
    if (denominator == 0) return std::nullopt;
    return static_cast<double>(numerator) / static_cast<double>(denominator);
  }
};

struct CurvePoint {
  int k = 0;                // k-th conclusion after the first incorrect one
  std::size_t still = 0;    // still incorrect at k
  std::size_t denominator = 0;  // incorrect through k-1 and a conclusion exists at k
  double probability() const { return static_cast<double>(still) / static_cast<double>(denominator); }
};

struct ErrorPathStats {
  std::vector<FicPath> paths;  // sorted by (game, verifier)
  std::vector<FlowEdge> flow;  // FIC -> NCS:* -> CSBS:* -> GS:*
  std::size_t initial_verifier_errors = 0;
  Rate persistence;
  Rate no_final_conclusion;
  Rate next_turn_still_incorrect;
  Rate success_despite_persistent;  // games with a persistent error
  Rate success_when_no_or_fixed;    // games with none, or all corrected
  std::vector<CurvePoint> persistence_curve;
  std::size_t games = 0;            // CoT games that reached a submission
  std::size_t excluded_forfeits = 0;
  std::size_t unresolved = 0;       // judgments left out of every rate
};

/// Joins judgments to games by setup id. Per (game, verifier, round) the
/// last judgment counts; unresolved judgments and forfeited games are left
/// out. Game-level rates cover chain-of-thought games only.
ErrorPathStats error_paths(std::span<const Judgment> judgments, std::span<const GameSummary> games);

nlohmann::json error_paths_to_json(const ErrorPathStats& s);

}  // namespace vericode
