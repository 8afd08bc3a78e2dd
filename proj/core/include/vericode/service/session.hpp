#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vericode/engine/transcript.hpp"
#include "vericode/protocol/prompts.hpp"
#include "vericode/protocol/retry.hpp"

namespace vericode {

/// Raised for actions on a game that is already over.
class SessionFinished : public Error {
 public:
  using Error::Error;
};

/// Per-reply metadata recorded with the raw response.
struct ResponseMeta {
  double latency_ms = 0;
  int prompt_tokens = 0;
  int completion_tokens = 0;
  int infra_retries = 0;
};

/// One game played through the text protocol: raw responses in, prompts out.
/// Parsing, retries, engine transitions and transcript events all happen
/// here, so every front end (runner, HTTP service) behaves identically.
class GameSession {
 public:
  struct Step {
    std::vector<Event> events;  // appended to the transcript by this call
    bool accepted = false;      // the response became an action
  };

  GameSession(GameSetup setup, const Catalog& catalog, Strategy strategy, std::string participant,
              nlohmann::json participant_config = nlohmann::json::object(), std::uint64_t seed = 0,
              const TemplatePack& pack = TemplatePack::builtin());

  /// Rebuilds a session by feeding the recorded responses through a fresh
  /// one; throws FormatError if the regenerated events differ.
  static GameSession restore(GameSetup setup, const Catalog& catalog, const Transcript& transcript,
                             const TemplatePack& pack = TemplatePack::builtin());

  /// The byte-exact text the participant currently sees.
  const std::string& prompt() const { return prompt_; }
  const std::string& prompt_step() const { return prompt_step_; }
  const GameState& state() const { return state_; }
  bool finished() const { return state_.finished(); }
  const Transcript& transcript() const { return transcript_; }
  const RetryLedger& ledger() const { return ledger_; }
  const PublicSetupView& view() const { return composer_.view(); }
  Strategy strategy() const { return composer_.strategy(); }
  int verifiers() const { return static_cast<int>(engine_.verifiers()); }

  /// `note` is a free-text reasoning note (human players); it is stored as
  /// the action's reasoning when the response carries none.
  Step post(const std::string& response, const ResponseMeta& meta = {},
            const std::optional<std::string>& note = std::nullopt);

  /// The participant could not be reached: forfeit(infra).
  Step fail_infra(const std::string& message, int attempts);

  /// Hidden answer, only once the game is over.
  std::optional<Code> revealed_secret() const;

 private:
  void emit(Step& step, int round, EventBody body);
  void set_prompt(Step& step, int round, std::string step_name, std::string text);
  void finish_events(Step& step, int round);

  GameEngine engine_;
  PromptComposer composer_;
  GameState state_;
  RetryLedger ledger_;
  Transcript transcript_;
  std::string prompt_;
  std::string prompt_step_;
};

}  // namespace vericode
