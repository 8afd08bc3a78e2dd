#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "vericode/setup/setup.hpp"

namespace vericode {

enum class Phase : std::uint8_t { kProposal, kQuestion, kDeduce, kFinished };
enum class Status : std::uint8_t { kInProgress, kWon, kLost, kForfeit };
enum class EndReason : std::uint8_t { kNone, kCorrect, kWrong, kCap, kRetries, kInfra };

std::string_view phase_name(Phase phase);
std::string_view status_name(Status status);
std::string_view end_reason_name(EndReason reason);
std::optional<Status> parse_status(std::string_view text);
std::optional<EndReason> parse_end_reason(std::string_view text);

inline constexpr int kRoundCap = 60;
inline constexpr int kQueriesPerRound = 3;

/// A move as the protocol expresses it. Verifier numbers are 1-based and may
/// be out of range; the engine rejects those without spending a query.
struct Action {
  enum class Kind : std::uint8_t { kPropose, kQuery, kSkip, kSubmit };
  Kind kind = Kind::kSkip;
  Code code;         // kPropose, kSubmit
  int verifier = 0;  // kQuery

  static Action propose(Code c) { return {Kind::kPropose, c, 0}; }
  static Action query(int v) { return {Kind::kQuery, {}, v}; }
  static Action skip() { return {Kind::kSkip, {}, 0}; }
  static Action submit(Code c) { return {Kind::kSubmit, c, 0}; }

  bool operator==(const Action& o) const {
    if (kind != o.kind) return false;
    if (kind == Kind::kQuery) return verifier == o.verifier;
    if (kind == Kind::kSkip) return true;
    return code == o.code;
  }
};

struct Feedback {
  int round = 0;
  int verifier = 0;  // as queried, 1-based
  bool pass = false;
  bool operator==(const Feedback&) const = default;
};

/// Dynamic part of a game. Contains nothing hidden: secrets stay in the engine.
struct GameState {
  int round = 1;
  Phase phase = Phase::kProposal;
  std::optional<Code> proposal;
  int queries_this_round = 0;
  std::vector<Feedback> history;
  Status status = Status::kInProgress;
  EndReason reason = EndReason::kNone;
  std::optional<Code> submitted;

  int total_queries() const { return static_cast<int>(history.size()); }
  bool finished() const { return phase == Phase::kFinished; }
  bool operator==(const GameState&) const = default;
};

class GameError : public Error {
 public:
  enum class Kind { kWrongPhase, kDigitRange, kInvalidVerifier, kBudget };
  GameError(Kind kind, const std::string& message) : Error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Rules of one game. Transitions are const and return new states, so a
/// (setup, action list) pair always replays to the same result.
class GameEngine {
 public:
  /// Validates the setup against the catalog (throws FormatError).
  GameEngine(GameSetup setup, const Catalog& catalog);

  const GameSetup& setup() const { return setup_; }
  std::size_t verifiers() const { return setup_.slots(); }

  GameState start() const { return {}; }

  GameState propose(const GameState& s, const Code& code) const;
  std::pair<GameState, Feedback> query(const GameState& s, int verifier) const;
  /// SKIP during the Question phase.
  GameState end_questions(const GameState& s) const;
  /// SKIP during the Deduce phase.
  GameState skip_round(const GameState& s) const;
  GameState submit(const GameState& s, const Code& code) const;
  GameState forfeit(const GameState& s, EndReason reason) const;

  /// Dispatches by phase: SKIP means end_questions in Question and
  /// skip_round in Deduce. Feedback is written for queries.
  GameState apply(const GameState& s, const Action& a, std::optional<Feedback>* feedback = nullptr) const;

  /// PASS/FAIL of the criterion the queried verifier really maps to.
  bool evaluate_query(int verifier, const Code& code) const;

 private:
  void require_phase(const GameState& s, Phase phase, std::string_view what) const;

  GameSetup setup_;
  std::vector<CodeSet> evaluated_;  // by queried slot, permutation applied
};

}  // namespace vericode
