#pragma once

#include <memory>
#include <nlohmann/json.hpp>
#include <string>
#include <string_view>
#include <vector>

#include "vericode/protocol/strategy.hpp"
#include "vericode/setup/setup.hpp"

namespace vericode {

struct AgentReply {
  std::string text;
  double latency_ms = 0;
  int prompt_tokens = 0;
  int completion_tokens = 0;
  int infra_retries = 0;  // transport failures absorbed before this reply
};

/// Anything that plays through the text protocol. Agents see the public setup
/// and the prompts, never the hidden part of a setup.
class Agent {
 public:
  virtual ~Agent() = default;

  /// Identity recorded in transcripts, e.g. "oracle" or "llm:model-name".
  virtual std::string name() const = 0;
  /// Settings recorded in transcript headers. Never includes credentials.
  virtual nlohmann::json config() const { return nlohmann::json::object(); }

  virtual void reset(const PublicSetupView& view, Strategy strategy) = 0;
  /// Throws InfraError when the agent cannot produce a reply at all.
  virtual AgentReply respond(const std::string& prompt) = 0;
};

/// What a prompt asks for, recovered from its text alone.
struct PromptReading {
  enum class Ask { kProposal, kQuestion, kDeduce, kNothing, kRepeat };
  struct Result {
    int verifier = 0;
    bool pass = false;
  };

  Ask ask = Ask::kRepeat;  // kRepeat: a re-prompt for the previous request
  std::vector<Result> results;  // "You chose Verifier <n> and the result is <R>."
};

PromptReading read_prompt(std::string_view prompt);

}  // namespace vericode
