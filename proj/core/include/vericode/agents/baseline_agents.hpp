#pragma once

#include <cstdint>
#include <memory>
#include <optional>

#include "vericode/agents/agent.hpp"
#include "vericode/agents/solver.hpp"
#include "vericode/util/rng.hpp"

namespace vericode {

/// Proposes a uniform random code, tests nothing, submits the proposal.
class RandomAgent : public Agent {
 public:
  explicit RandomAgent(std::uint64_t seed) : rng_(seed) {}

  std::string name() const override { return "random"; }
  void reset(const PublicSetupView& view, Strategy strategy) override;
  AgentReply respond(const std::string& prompt) override;

  /// The bare decision, for callers that skip the text protocol.
  Code draw_code() { return Code::from_index(static_cast<int>(uniform_below(rng_, kCodeCount))); }

 private:
  Rng rng_;
  Strategy strategy_ = Strategy::kAnswerOnly;
  Code proposal_;
  std::string last_;
};

/// Plays the candidate-set solver through the text protocol. In CoT runs the
/// reasoning carries one line per verifier at each Deduce step:
///
///   [claim] verifier 2: YELLOW = PURPLE | YELLOW > PURPLE
///
/// listing the rules that verifier may still be applying.
class OracleAgent : public Agent {
 public:
  explicit OracleAgent(const Catalog& catalog, SolverOptions options = {})
      : catalog_(&catalog), options_(options) {}

  std::string name() const override { return "oracle"; }
  nlohmann::json config() const override;
  void reset(const PublicSetupView& view, Strategy strategy) override;
  AgentReply respond(const std::string& prompt) override;

  const CandidateSolver& solver() const { return *solver_; }

 private:
  std::string claims() const;
  std::string reply(const Action& action, std::string reasoning);

  const Catalog* catalog_;
  SolverOptions options_;
  Strategy strategy_ = Strategy::kAnswerOnly;
  std::unique_ptr<CandidateSolver> solver_;
  std::optional<Code> proposal_;
  std::optional<QueryChoice> plan_;
  std::string last_;
};

}  // namespace vericode
