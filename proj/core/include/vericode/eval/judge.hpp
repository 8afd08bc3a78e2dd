#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vericode/eval/extract.hpp"
#include "vericode/setup/setup.hpp"

namespace vericode {

/// The criterion a claim about queried verifier N is measured against: the
/// active rule of the card evaluated when N is queried (permutation[N-1]).
const Criterion& claim_truth(const GameSetup& setup, const Catalog& catalog, int verifier);

/// Extensional judgment over the 125 codes. Correct: the claim's distinct
/// alternatives are exactly the truth. Include: the truth is one of several.
/// Incorrect otherwise. nullopt when the claim has no parseable rules.
std::optional<Judgment> judge_deterministic(const Conclusion& claim, const Criterion& truth);

/// Asks a completion endpoint to classify the claim and reads
/// "CATEGORY: Correct|Incorrect|Include" from the reply. Replies without
/// exactly one category are retried; after `attempts` tries the judgment is
/// unresolved and flagged. Transport failures propagate as InfraError.
class ExternalJudge {
 public:
  ExternalJudge(std::shared_ptr<CompletionClient> client, std::string model, int attempts = 3);
  Judgment judge(const Conclusion& claim, const Criterion& truth, std::vector<ExchangeLog>* log = nullptr) const;
  std::string identity() const { return "external:" + model_; }

 private:
  std::shared_ptr<CompletionClient> client_;
  std::string model_;
  int attempts_;
};

/// Reads the category out of a judge reply; nullopt unless exactly one of
/// the three category words appears after "CATEGORY:".
std::optional<Category> parse_judge_reply(std::string_view reply);

struct JudgeOptions {
  std::shared_ptr<ExternalJudge> external;  // for free-text claims; optional
  bool cross_check = false;  // also ask the external judge for structured claims; flag disagreements
};

/// Judges every conclusion of one game. Free-text claims without an
/// external judge come back unresolved and flagged.
std::vector<Judgment> judge_game(const std::vector<Conclusion>& claims, const GameSetup& setup,
                                 const Catalog& catalog, const JudgeOptions& options = {},
                                 std::vector<ExchangeLog>* log = nullptr);

}  // namespace vericode
