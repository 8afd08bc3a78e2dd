#include "vericode/service/session.hpp"

#include "vericode/protocol/response.hpp"

namespace vericode {

GameSession::GameSession(GameSetup setup, const Catalog& catalog, Strategy strategy, std::string participant,
                         nlohmann::json participant_config, std::uint64_t seed, const TemplatePack& pack)
    : engine_(std::move(setup), catalog),
      composer_(public_view(engine_.setup()), catalog, strategy, pack),
      state_(engine_.start()) {
  auto& h = transcript_.header;
  h.setup_id = engine_.setup().id;
  h.mode = engine_.setup().mode;
  h.difficulty = engine_.setup().difficulty;
  h.strategy = strategy;
  h.agent = std::move(participant);
  h.seed = seed;
  h.catalog = catalog.fingerprint();
  h.templates = pack.checksum();
  h.config = std::move(participant_config);
  Step opening;
  set_prompt(opening, 1, "proposal", composer_.opening());
}

GameSession GameSession::restore(GameSetup setup, const Catalog& catalog, const Transcript& transcript,
                                 const TemplatePack& pack) {
  const auto& h = transcript.header;
  if (h.templates != pack.checksum()) {
    throw ConfigError("transcript was recorded with template pack " + h.templates + ", loaded pack is " +
                      pack.checksum());
  }
  GameSession s(std::move(setup), catalog, h.strategy, h.agent, h.config, h.seed, pack);
  if (s.transcript_.header != h) throw FormatError("transcript header does not match its setup");
  std::size_t i = 1;  // events[0] is the opening prompt
  if (transcript.events.empty() || !(transcript.events[0] == s.transcript_.events[0])) {
    throw FormatError("transcript does not start with the opening prompt");
  }
  const auto& ev = transcript.events;
  while (i < ev.size()) {
    Step step;
    if (const auto* r = std::get_if<ResponseEvent>(&ev[i].body)) {
      std::optional<std::string> note;
      // A human's note is only visible on the resulting action event.
      for (std::size_t k = i + 1; k < ev.size() && !std::holds_alternative<ResponseEvent>(ev[k].body); ++k) {
        if (const auto* a = std::get_if<ActionEvent>(&ev[k].body)) {
          if (s.strategy() == Strategy::kAnswerOnly && a->reasoning) note = a->reasoning;
          break;
        }
      }
      step = s.post(r->text, {r->latency_ms, r->prompt_tokens, r->completion_tokens, r->infra_retries}, note);
    } else if (const auto* inf = std::get_if<InfraEvent>(&ev[i].body)) {
      step = s.fail_infra(inf->message, inf->attempt);
    } else {
      throw FormatError("unexpected " + std::string(event_type(ev[i].body)) + " event at seq " +
                        std::to_string(ev[i].seq));
    }
    for (const auto& e : step.events) {
      if (i >= ev.size() || !(ev[i] == e)) {
        throw FormatError("transcript diverges from the session at seq " + std::to_string(e.seq));
      }
      ++i;
    }
  }
  s.transcript_ = transcript;  // keep the original wall-clock annotations
  return s;
}

void GameSession::emit(Step& step, int round, EventBody body) {
  Event e{transcript_.next_seq(), round, utc_now(), std::move(body)};
  transcript_.events.push_back(e);
  step.events.push_back(std::move(e));
}

void GameSession::set_prompt(Step& step, int round, std::string step_name, std::string text) {
  prompt_ = std::move(text);
  prompt_step_ = std::move(step_name);
  emit(step, round, PromptEvent{prompt_step_, prompt_});
}

void GameSession::finish_events(Step& step, int round) {
  emit(step, round,
       OutcomeEvent{state_.status, state_.reason, state_.submitted, state_.round, state_.total_queries()});
}

std::optional<Code> GameSession::revealed_secret() const {
  if (!finished()) return std::nullopt;
  return engine_.setup().secret;
}

GameSession::Step GameSession::post(const std::string& response, const ResponseMeta& meta,
                                    const std::optional<std::string>& note) {
  if (finished()) throw SessionFinished("the game is already over");
  Step step;
  const int round = state_.round;
  const Phase phase = state_.phase;
  emit(step, round,
       ResponseEvent{response, meta.latency_ms, meta.prompt_tokens, meta.completion_tokens, meta.infra_retries});

  auto reject = [&](RetryError error, std::string detail, int verifier) {
    const auto d = retry(ledger_, error, phase, view().mode, strategy(), verifier, composer_.pack());
    const std::string step_name =
        error == RetryError::kInvalidVerifier ? "invalid_verifier"
        : phase == Phase::kProposal           ? "proposal_format"
        : phase == Phase::kQuestion           ? "question_format"
                                              : "deduce_format";
    emit(step, round, RetryEvent{step_name, std::string(retry_error_name(error)), std::move(detail), d.consecutive, d.give_up});
    if (d.give_up) {
      state_ = engine_.forfeit(state_, EndReason::kRetries);
      finish_events(step, round);
      set_prompt(step, round, "forfeit", PromptComposer::forfeit_notice(EndReason::kRetries));
    } else {
      set_prompt(step, round, step_name, d.prompt);
    }
  };

  const auto parsed = parse_response(response, phase, strategy());
  if (!parsed.ok()) {
    reject(*parsed.error == ResponseError::kFormat ? RetryError::kFormat : RetryError::kMissingReasoning,
           parsed.detail, 0);
    return step;
  }
  const Action action = parsed.parsed->action;
  std::optional<Feedback> fb;
  GameState next;
  try {
    next = engine_.apply(state_, action, &fb);
  } catch (const GameError& e) {
    if (e.kind() == GameError::Kind::kInvalidVerifier) {
      reject(RetryError::kInvalidVerifier, e.what(), action.verifier);
    } else {
      reject(RetryError::kFormat, e.what(), 0);
    }
    return step;
  }

  ledger_.clear_streak();
  step.accepted = true;
  state_ = std::move(next);
  emit(step, round, ActionEvent{action, parsed.parsed->reasoning ? parsed.parsed->reasoning : note});
  if (fb) emit(step, round, FeedbackEvent{*fb});
  if (state_.finished()) finish_events(step, round);

  switch (action.kind) {
    case Action::Kind::kPropose: set_prompt(step, round, "question_first", composer_.question_first()); break;
    case Action::Kind::kQuery:
      set_prompt(step, round, state_.queries_this_round >= kQueriesPerRound ? "question_last" : "question_following",
                 composer_.after_query(*fb, state_.queries_this_round));
      break;
    case Action::Kind::kSkip:
      if (phase == Phase::kQuestion) {
        set_prompt(step, round, "deduce", composer_.deduce());
      } else if (state_.finished()) {
        set_prompt(step, round, "round_cap", PromptComposer::cap_notice());
      } else {
        set_prompt(step, state_.round, "proposal", composer_.proposal());
      }
      break;
    case Action::Kind::kSubmit:
      set_prompt(step, round, "deduce_result", composer_.result(action.code, engine_.setup().secret));
      break;
  }
  return step;
}

GameSession::Step GameSession::fail_infra(const std::string& message, int attempts) {
  if (finished()) throw SessionFinished("the game is already over");
  Step step;
  const int round = state_.round;
  emit(step, round, InfraEvent{message, attempts});
  state_ = engine_.forfeit(state_, EndReason::kInfra);
  finish_events(step, round);
  set_prompt(step, round, "forfeit", PromptComposer::forfeit_notice(EndReason::kInfra));
  return step;
}

}  // namespace vericode
