#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "vericode/agents/llm_agent.hpp"
#include "vericode/engine/transcript.hpp"
#include "vericode/eval/judgment.hpp"

namespace vericode {

/// Claims in one reasoning block. Recognizes structured lines
///
///   [claim] verifier 2: YELLOW = PURPLE | YELLOW > PURPLE
///
/// and plain sentences such as "verifier 2 must be checking yellow equals
/// purple" (comparisons between colors and digits, parity). A sentence whose
/// relation cannot be read yields a free-text conclusion with no rules.
/// Every claim is kept, including repeated claims about one verifier.
std::vector<Conclusion> extract_claims(std::string_view reasoning);

/// Pattern extraction over every reasoning block of a transcript; empty for
/// answer-only games.
std::vector<Conclusion> extract_pattern(const Transcript& transcript);

/// Entry in the I/O log of a model-backed evaluator step.
struct ExchangeLog {
  std::string request;
  std::string reply;
  std::string error;
};

/// Sends each reasoning block with the verifier descriptions to a completion
/// endpoint and reads back
///
///   {"conclusions": [{"verifier": 2, "rules": ["YELLOW = PURPLE"], "text": "..."}]}
///
/// Transport failures propagate as InfraError; a reply that is not in this
/// form contributes no conclusions and is logged with the error.
class ExternalExtractor {
 public:
  ExternalExtractor(std::shared_ptr<CompletionClient> client, std::string model, const Catalog& catalog);
  std::vector<Conclusion> extract(const Transcript& transcript, const PublicSetupView& view,
                                  std::vector<ExchangeLog>* log = nullptr) const;
  std::string identity() const { return "external:" + model_; }

 private:
  std::shared_ptr<CompletionClient> client_;
  std::string model_;
  const Catalog* catalog_;
};

}  // namespace vericode
