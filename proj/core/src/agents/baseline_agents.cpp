#include "vericode/agents/baseline_agents.hpp"

#include "vericode/protocol/response.hpp"

namespace vericode {

void RandomAgent::reset(const PublicSetupView&, Strategy strategy) {
  strategy_ = strategy;
  last_.clear();
}

AgentReply RandomAgent::respond(const std::string& prompt) {
  const auto reading = read_prompt(prompt);
  std::optional<std::string> why;
  if (strategy_ == Strategy::kChainOfThought) why = "Random play.";
  switch (reading.ask) {
    case PromptReading::Ask::kProposal:
      proposal_ = draw_code();
      last_ = format_response(Action::propose(proposal_), why);
      break;
    case PromptReading::Ask::kQuestion: last_ = format_response(Action::skip(), why); break;
    case PromptReading::Ask::kDeduce: last_ = format_response(Action::submit(proposal_), why); break;
    case PromptReading::Ask::kNothing: return {};
    case PromptReading::Ask::kRepeat: break;
  }
  return {last_};
}

nlohmann::json OracleAgent::config() const {
  return {{"meta_rules", options_.use_meta_rules},
          {"submit_policy", options_.policy == SubmitPolicy::kResolveBeforeSubmit ? "resolve" : "code_agreement"}};
}

void OracleAgent::reset(const PublicSetupView& view, Strategy strategy) {
  strategy_ = strategy;
  solver_ = std::make_unique<CandidateSolver>(view, *catalog_, options_);
  proposal_.reset();
  plan_.reset();
  last_.clear();
}

std::string OracleAgent::claims() const {
  std::string out;
  for (int v = 1; v <= static_cast<int>(solver_->verifiers()); ++v) {
    if (!out.empty()) out += '\n';
    out += "[claim] verifier " + std::to_string(v) + ": ";
    const auto rules = solver_->possible_rules(v);
    for (std::size_t i = 0; i < rules.size(); ++i) {
      if (i > 0) out += " | ";
      out += rules[i]->rule;
    }
  }
  return out;
}

std::string OracleAgent::reply(const Action& action, std::string reasoning) {
  std::optional<std::string> why;
  if (strategy_ == Strategy::kChainOfThought) why = std::move(reasoning);
  last_ = format_response(action, why);
  return last_;
}

AgentReply OracleAgent::respond(const std::string& prompt) {
  const auto reading = read_prompt(prompt);
  for (const auto& r : reading.results) {
    if (proposal_) solver_->observe(*proposal_, r.verifier, r.pass);
  }
  const std::string remaining = std::to_string(solver_->survivors()) + " hypotheses remain.";

  switch (reading.ask) {
    case PromptReading::Ask::kProposal: {
      if (auto code = solver_->submission()) {
        proposal_ = *code;
        return {reply(Action::propose(*code), remaining + " Every verifier is determined; proposing the answer.")};
      }
      plan_ = solver_->best_query();
      proposal_ = plan_->proposal;
      return {reply(Action::propose(*proposal_),
                    remaining + " Verifier " + std::to_string(plan_->verifier) + " on this code removes at least " +
                        std::to_string(plan_->min_split) + " of them.")};
    }
    case PromptReading::Ask::kQuestion: {
      if (!solver_->submission()) {
        if (auto q = solver_->best_query(proposal_)) {
          return {reply(Action::query(q->verifier), remaining + " Verifier " + std::to_string(q->verifier) +
                                                         " removes at least " + std::to_string(q->min_split) + ".")};
        }
      }
      return {reply(Action::skip(), remaining + " No verifier splits them with this code.")};
    }
    case PromptReading::Ask::kDeduce: {
      const std::string lines = claims();
      if (auto code = solver_->submission()) {
        return {reply(Action::submit(*code), lines + "\nEvery verifier rule is determined, so the code is " +
                                                  to_string(*code) + ".")};
      }
      return {reply(Action::skip(), lines + "\n" + remaining + " More information is needed.")};
    }
    case PromptReading::Ask::kNothing: return {};
    case PromptReading::Ask::kRepeat: break;
  }
  return {last_};
}

}  // namespace vericode
