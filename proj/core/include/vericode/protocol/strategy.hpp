#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

namespace vericode {

/// Answer-only vs chain-of-thought prompting.
enum class Strategy : std::uint8_t { kAnswerOnly, kChainOfThought };

std::string_view strategy_name(Strategy strategy);  // "oa" / "cot"
std::optional<Strategy> parse_strategy(std::string_view text);

}  // namespace vericode
