#pragma once

#include <string>

#include "vericode/engine/game.hpp"
#include "vericode/protocol/templates.hpp"

namespace vericode {

/// Builds the prompt shown at each point of the game flow. Where two
/// templates apply at once they are joined by a blank line: System before the
/// first Proposal, and QuestionLast before Deduce after the third query.
class PromptComposer {
 public:
  PromptComposer(PublicSetupView view, const Catalog& catalog, Strategy strategy,
                 const TemplatePack& pack = TemplatePack::builtin());

  std::string opening() const;         // System + Proposal
  std::string proposal() const;        // start of a later round
  std::string question_first() const;  // after the proposal is accepted
  /// Feedback for query number `queries_used` of the round (1..3); the third
  /// one moves straight on to the Deduce stage.
  std::string after_query(const Feedback& feedback, int queries_used) const;
  std::string deduce() const;          // after SKIP in the Question stage
  std::string result(const Code& submitted, const Code& answer) const;

  /// Plain notices for games that end without a submission.
  static std::string cap_notice();
  static std::string forfeit_notice(EndReason reason);

  const PublicSetupView& view() const { return view_; }
  Strategy strategy() const { return strategy_; }
  const TemplatePack& pack() const { return *pack_; }

 private:
  std::string render(Step step, const RenderContext& ctx = {}) const;

  PublicSetupView view_;
  const Catalog* catalog_;
  Strategy strategy_;
  const TemplatePack* pack_;
};

}  // namespace vericode
