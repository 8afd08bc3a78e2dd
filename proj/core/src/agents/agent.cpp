#include "vericode/agents/agent.hpp"

#include <regex>

namespace vericode {

PromptReading read_prompt(std::string_view prompt) {
  PromptReading r;
  struct Marker {
    std::string_view text;
    PromptReading::Ask ask;
  };
  static constexpr Marker kMarkers[] = {
      {"**Proposal Stage**", PromptReading::Ask::kProposal},
      {"**Verifier Questioning Stage**", PromptReading::Ask::kQuestion},
      {"**Deduce Stage**", PromptReading::Ask::kDeduce},
      {"You chose Verifier <", PromptReading::Ask::kQuestion},
      {"The final guess is ", PromptReading::Ask::kNothing},
      {"The game is over", PromptReading::Ask::kNothing},
  };
  std::size_t best = 0;
  bool found = false;
  for (const auto& m : kMarkers) {
    const auto at = prompt.rfind(m.text);
    if (at != std::string_view::npos && (!found || at > best)) {
      best = at;
      found = true;
      r.ask = m.ask;
    }
  }

  static const std::regex result_re(R"(You chose Verifier <(\d+)> and the result is <(PASS|FAIL)>)");
  const std::string text(prompt);
  for (auto it = std::sregex_iterator(text.begin(), text.end(), result_re); it != std::sregex_iterator(); ++it) {
    r.results.push_back({std::stoi((*it)[1].str()), (*it)[2].str() == "PASS"});
  }
  return r;
}

}  // namespace vericode
