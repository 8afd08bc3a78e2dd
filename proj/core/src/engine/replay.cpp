#include "vericode/engine/replay.hpp"

#include "vericode/util/overloaded.hpp"

namespace vericode {

ReplayReport replay(const Transcript& transcript, const GameSetup& setup, const Catalog& catalog) {
  const auto& h = transcript.header;
  if (h.catalog != catalog.fingerprint()) {
    throw ConfigError("transcript was recorded with catalog " + h.catalog + ", loaded catalog is " +
                      catalog.fingerprint());
  }
  if (h.setup_id != setup.id || h.mode != setup.mode || h.difficulty != setup.difficulty) {
    throw ConfigError("transcript belongs to setup " + h.setup_id + ", not " + setup.id);
  }

  const GameEngine engine(setup, catalog);
  ReplayReport report;
  GameState state = engine.start();
  std::optional<Feedback> expected;  // produced by the last action, not yet matched
  bool gave_up = false;
  bool infra = false;

  auto diverge = [&](const Event& e, std::string why) {
    report.ok = false;
    report.divergence_seq = e.seq;
    report.message = "event " + std::to_string(e.seq) + " (" + std::string(event_type(e.body)) +
                     "): " + std::move(why);
  };

  for (const auto& e : transcript.events) {
    if (!report.ok) break;
    if (expected && !std::holds_alternative<FeedbackEvent>(e.body)) {
      diverge(e, "query result was not recorded");
      break;
    }
    std::visit(
        Overloaded{
            [&](const ActionEvent& a) {
              if (state.finished()) return diverge(e, "action after the game ended");
              if (e.round != state.round) return diverge(e, "round number out of step");
              try {
                state = engine.apply(state, a.action, &expected);
              } catch (const GameError& err) {
                diverge(e, std::string("illegal action: ") + err.what());
              }
            },
            [&](const FeedbackEvent& f) {
              if (!expected) return diverge(e, "feedback without a query");
              if (!(f.feedback == *expected)) {
                return diverge(e, "recorded verifier " + std::to_string(f.feedback.verifier) + " " +
                                      (f.feedback.pass ? "PASS" : "FAIL") + ", engine gives " +
                                      (expected->pass ? "PASS" : "FAIL"));
              }
              expected.reset();
            },
            [&](const RetryEvent& r) { gave_up = gave_up || r.give_up; },
            [&](const InfraEvent&) { infra = true; },
            [&](const OutcomeEvent& o) {
              if (o.status == Status::kForfeit && !state.finished()) {
                const bool justified = (o.reason == EndReason::kRetries && gave_up) ||
                                       (o.reason == EndReason::kInfra && infra);
                if (!justified) return diverge(e, "forfeit without a recorded cause");
                state = engine.forfeit(state, o.reason);
              }
              if (o.status != state.status || o.reason != state.reason || o.submitted != state.submitted ||
                  o.rounds != state.round || o.queries != state.total_queries()) {
                diverge(e, "outcome " + std::string(status_name(o.status)) + "/" +
                               std::string(end_reason_name(o.reason)) + " does not match engine " +
                               std::string(status_name(state.status)) + "/" +
                               std::string(end_reason_name(state.reason)));
              }
            },
            [](const PromptEvent&) {},
            [](const ResponseEvent&) {},
        },
        e.body);
  }
  if (report.ok && expected) {
    report.ok = false;
    report.message = "transcript ends before the last query result";
  }
  if (report.ok && state.finished() && transcript.outcome() == nullptr) {
    report.ok = false;
    report.message = "game ended but no outcome was recorded";
  }
  report.final_state = state;
  return report;
}

}  // namespace vericode
