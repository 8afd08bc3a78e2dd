#pragma once

#include <array>
#include <string>
#include <string_view>

#include "vericode/engine/game.hpp"
#include "vericode/protocol/templates.hpp"

namespace vericode {

enum class RetryError { kFormat, kMissingReasoning, kInvalidVerifier };

std::string_view retry_error_name(RetryError error);  // "format", "missing_reasoning", "invalid_verifier"

inline constexpr int kRetryBound = 3;

/// Error counts for one game. Format and missing-reasoning errors count as
/// format errors; invalid verifier numbers as illegal actions.
class RetryLedger {
 public:
  struct Counters {
    int format_errors = 0;
    int illegal_actions = 0;
    bool operator==(const Counters&) const = default;
  };

  /// Records an error at the current step; returns the consecutive count.
  int record(RetryError error, Phase phase);
  /// A valid response arrived; the next step starts from zero.
  void clear_streak() { consecutive_ = 0; }

  int consecutive() const { return consecutive_; }
  /// True once the current step has exceeded the retry bound.
  bool exhausted() const { return consecutive_ > kRetryBound; }
  const Counters& phase(Phase p) const { return per_phase_.at(static_cast<std::size_t>(p)); }
  Counters totals() const;

 private:
  std::array<Counters, 3> per_phase_{};  // proposal, question, deduce
  int consecutive_ = 0;
};

struct RetryDecision {
  std::string prompt;  // empty when giving up
  bool give_up = false;
  int consecutive = 0;
};

/// Records the error and picks the matching re-prompt: the stage's "not valid
/// format" text, or the invalid-verifier text for bad verifier numbers.
RetryDecision retry(RetryLedger& ledger, RetryError error, Phase phase, Mode mode, Strategy strategy,
                    int verifier_num, const TemplatePack& pack = TemplatePack::builtin());

}  // namespace vericode
