#include "vericode/engine/game.hpp"

#include <string>

namespace vericode {

std::string_view phase_name(Phase phase) {
  switch (phase) {
    case Phase::kProposal: return "proposal";
    case Phase::kQuestion: return "question";
    case Phase::kDeduce: return "deduce";
    case Phase::kFinished: return "finished";
  }
  return "?";
}

std::string_view status_name(Status status) {
  switch (status) {
    case Status::kInProgress: return "in_progress";
    case Status::kWon: return "won";
    case Status::kLost: return "lost";
    case Status::kForfeit: return "forfeit";
  }
  return "?";
}

std::string_view end_reason_name(EndReason reason) {
  switch (reason) {
    case EndReason::kNone: return "none";
    case EndReason::kCorrect: return "correct";
    case EndReason::kWrong: return "wrong";
    case EndReason::kCap: return "cap";
    case EndReason::kRetries: return "retries";
    case EndReason::kInfra: return "infra";
  }
  return "?";
}

std::optional<Status> parse_status(std::string_view text) {
  for (auto s : {Status::kInProgress, Status::kWon, Status::kLost, Status::kForfeit}) {
    if (status_name(s) == text) return s;
  }
  return std::nullopt;
}

std::optional<EndReason> parse_end_reason(std::string_view text) {
  for (auto r : {EndReason::kNone, EndReason::kCorrect, EndReason::kWrong, EndReason::kCap,
                 EndReason::kRetries, EndReason::kInfra}) {
    if (end_reason_name(r) == text) return r;
  }
  return std::nullopt;
}

GameEngine::GameEngine(GameSetup setup, const Catalog& catalog) : setup_(std::move(setup)) {
  validate_setup(setup_, catalog);
  for (std::size_t q = 0; q < setup_.slots(); ++q) {
    evaluated_.push_back(active_criterion(setup_, catalog, setup_.permutation[q]).extension);
  }
}

void GameEngine::require_phase(const GameState& s, Phase phase, std::string_view what) const {
  if (s.phase != phase) {
    throw GameError(GameError::Kind::kWrongPhase, std::string(what) + " is not allowed in the " +
                                                      std::string(phase_name(s.phase)) + " phase");
  }
}

bool GameEngine::evaluate_query(int verifier, const Code& code) const {
  return evaluated_.at(static_cast<std::size_t>(verifier - 1)).test(static_cast<std::size_t>(code.index()));
}

GameState GameEngine::propose(const GameState& s, const Code& code) const {
  require_phase(s, Phase::kProposal, "a proposal");
  if (!code.valid()) throw GameError(GameError::Kind::kDigitRange, "code digits must be 1 to 5");
  GameState n = s;
  n.proposal = code;
  n.phase = Phase::kQuestion;
  n.queries_this_round = 0;
  return n;
}

std::pair<GameState, Feedback> GameEngine::query(const GameState& s, int verifier) const {
  require_phase(s, Phase::kQuestion, "a verifier query");
  if (s.queries_this_round >= kQueriesPerRound) {
    throw GameError(GameError::Kind::kBudget, "at most three verifiers per round");
  }
  if (verifier < 1 || static_cast<std::size_t>(verifier) > verifiers()) {
    throw GameError(GameError::Kind::kInvalidVerifier,
                    "verifier " + std::to_string(verifier) + " does not exist");
  }
  GameState n = s;
  const Feedback fb{s.round, verifier, evaluate_query(verifier, *s.proposal)};
  n.history.push_back(fb);
  if (++n.queries_this_round == kQueriesPerRound) n.phase = Phase::kDeduce;
  return {std::move(n), fb};
}

GameState GameEngine::end_questions(const GameState& s) const {
  require_phase(s, Phase::kQuestion, "ending the question stage");
  GameState n = s;
  n.phase = Phase::kDeduce;
  return n;
}

GameState GameEngine::skip_round(const GameState& s) const {
  require_phase(s, Phase::kDeduce, "skipping the deduction");
  GameState n = s;
  if (s.round >= kRoundCap) {
    n.phase = Phase::kFinished;
    n.status = Status::kLost;
    n.reason = EndReason::kCap;
    return n;
  }
  ++n.round;
  n.phase = Phase::kProposal;
  n.proposal.reset();
  n.queries_this_round = 0;
  return n;
}

GameState GameEngine::submit(const GameState& s, const Code& code) const {
  require_phase(s, Phase::kDeduce, "a submission");
  if (!code.valid()) throw GameError(GameError::Kind::kDigitRange, "code digits must be 1 to 5");
  GameState n = s;
  n.phase = Phase::kFinished;
  n.submitted = code;
  const bool won = code == setup_.secret;
  n.status = won ? Status::kWon : Status::kLost;
  n.reason = won ? EndReason::kCorrect : EndReason::kWrong;
  return n;
}

GameState GameEngine::forfeit(const GameState& s, EndReason reason) const {
  if (s.finished()) throw GameError(GameError::Kind::kWrongPhase, "the game is already over");
  GameState n = s;
  n.phase = Phase::kFinished;
  n.status = Status::kForfeit;
  n.reason = reason;
  return n;
}

GameState GameEngine::apply(const GameState& s, const Action& a,
                            std::optional<Feedback>* feedback) const {
  if (feedback != nullptr) feedback->reset();
  switch (a.kind) {
    case Action::Kind::kPropose: return propose(s, a.code);
    case Action::Kind::kQuery: {
      auto [n, fb] = query(s, a.verifier);
      if (feedback != nullptr) *feedback = fb;
      return n;
    }
    case Action::Kind::kSkip:
      if (s.phase == Phase::kQuestion) return end_questions(s);
      return skip_round(s);
    case Action::Kind::kSubmit: return submit(s, a.code);
  }
  return s;
}

}  // namespace vericode
