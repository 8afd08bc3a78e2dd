#include "vericode/protocol/prompts.hpp"

namespace vericode {

PromptComposer::PromptComposer(PublicSetupView view, const Catalog& catalog, Strategy strategy,
                               const TemplatePack& pack)
    : view_(std::move(view)), catalog_(&catalog), strategy_(strategy), pack_(&pack) {}

std::string PromptComposer::render(Step step, const RenderContext& ctx) const {
  return pack_->render({view_.mode, strategy_, step}, ctx);
}

std::string PromptComposer::opening() const {
  return render(Step::kSystem, {{"game_setup", describe_game_setup(view_, *catalog_)}}) + "\n\n" +
         proposal();
}

std::string PromptComposer::proposal() const { return render(Step::kProposal); }

std::string PromptComposer::question_first() const {
  return render(Step::kQuestionFirst, {{"verifier_descriptions", describe_verifiers(view_, *catalog_)}});
}

std::string PromptComposer::after_query(const Feedback& fb, int queries_used) const {
  const RenderContext ctx{{"verifier_num", std::to_string(fb.verifier)},
                          {"verifier_result", fb.pass ? "PASS" : "FAIL"}};
  if (queries_used >= kQueriesPerRound) return render(Step::kQuestionLast, ctx) + "\n\n" + deduce();
  return render(Step::kQuestionFollowing, ctx);
}

std::string PromptComposer::deduce() const { return render(Step::kDeduce); }

std::string PromptComposer::result(const Code& submitted, const Code& answer) const {
  return render(Step::kDeduceResult, {{"submitted_code", to_string(submitted)},
                                      {"answer", to_string(answer)},
                                      {"is_correct", submitted == answer ? "correct" : "incorrect"}});
}

std::string PromptComposer::cap_notice() {
  return "The game is over: the round limit of " + std::to_string(kRoundCap) +
         " rounds was reached without a final guess.";
}

std::string PromptComposer::forfeit_notice(EndReason reason) {
  if (reason == EndReason::kInfra) return "The game is over: the agent could not be reached.";
  return "The game is over: too many responses did not follow the required format.";
}

}  // namespace vericode
