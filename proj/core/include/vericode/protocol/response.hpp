#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "vericode/engine/game.hpp"
#include "vericode/protocol/strategy.hpp"

namespace vericode {

struct ParsedAction {
  Action action;
  std::optional<std::string> reasoning;  // CoT only
  bool operator==(const ParsedAction&) const = default;
};

enum class ResponseError { kFormat, kMissingReasoning };

struct ParseResult {
  std::optional<ParsedAction> parsed;
  std::optional<ResponseError> error;
  std::string detail;

  bool ok() const { return parsed.has_value(); }
};

/// Reads the last "<CHOICE>:" in the text. The tag itself is exact (upper
/// case, optional spaces before the colon); the value after it is lenient:
/// colour names in any case, optional [brackets] around numbers, spaces
/// around separators, one trailing period. Prose around the tag is ignored.
///
/// Admissible values by phase: Proposal a code; Question a verifier number
/// or SKIP; Deduce SKIP or a code (a submission). In CoT a non-empty
/// "<REASONING>:" block before the choice is required. Never throws.
ParseResult parse_response(std::string_view text, Phase phase, Strategy strategy);

/// "<CHOICE>: BLUE=1, YELLOW=1, PURPLE=1", "<CHOICE>: 3", "<CHOICE>: SKIP",
/// preceded by "<REASONING>: ...\n" when reasoning is given.
std::string format_response(const Action& action, const std::optional<std::string>& reasoning = {});

}  // namespace vericode
