#include "vericode/protocol/retry.hpp"

namespace vericode {

std::string_view retry_error_name(RetryError error) {
  switch (error) {
    case RetryError::kFormat: return "format";
    case RetryError::kMissingReasoning: return "missing_reasoning";
    case RetryError::kInvalidVerifier: return "invalid_verifier";
  }
  return "?";
}

int RetryLedger::record(RetryError error, Phase phase) {
  if (phase == Phase::kFinished) throw Error("no retries once the game is over");
  auto& c = per_phase_.at(static_cast<std::size_t>(phase));
  if (error == RetryError::kInvalidVerifier) {
    ++c.illegal_actions;
  } else {
    ++c.format_errors;
  }
  return ++consecutive_;
}

RetryLedger::Counters RetryLedger::totals() const {
  Counters t;
  for (const auto& c : per_phase_) {
    t.format_errors += c.format_errors;
    t.illegal_actions += c.illegal_actions;
  }
  return t;
}

RetryDecision retry(RetryLedger& ledger, RetryError error, Phase phase, Mode mode, Strategy strategy,
                    int verifier_num, const TemplatePack& pack) {
  RetryDecision d;
  d.consecutive = ledger.record(error, phase);
  if (ledger.exhausted()) {
    d.give_up = true;
    return d;
  }
  Step step = Step::kProposalFormat;
  RenderContext ctx;
  if (error == RetryError::kInvalidVerifier) {
    step = Step::kInvalidVerifier;
    ctx["verifier_num"] = std::to_string(verifier_num);
  } else if (phase == Phase::kQuestion) {
    step = Step::kQuestionFormat;
  } else if (phase == Phase::kDeduce) {
    step = Step::kDeduceFormat;
  }
  d.prompt = pack.render({mode, strategy, step}, ctx);
  return d;
}

}  // namespace vericode
