#include "vericode/protocol/strategy.hpp"

namespace vericode {

std::string_view strategy_name(Strategy strategy) {
  return strategy == Strategy::kAnswerOnly ? "oa" : "cot";
}

std::optional<Strategy> parse_strategy(std::string_view text) {
  if (text == "oa") return Strategy::kAnswerOnly;
  if (text == "cot") return Strategy::kChainOfThought;
  return std::nullopt;
}

}  // namespace vericode
