#include "vericode/protocol/response.hpp"

#include <cctype>
#include <regex>

namespace vericode {

namespace {

constexpr std::string_view kChoiceTag = "<CHOICE>";
constexpr std::string_view kReasoningTag = "<REASONING>";

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Position just past "<TAG>\s*:" for the last such tag at or before `limit`,
// along with the tag's own position.
std::optional<std::pair<std::size_t, std::size_t>> last_tag(std::string_view text, std::string_view tag,
                                                            std::size_t limit) {
  std::size_t pos = std::min(limit, text.size());
  while (true) {
    const auto at = text.rfind(tag, pos);
    if (at == std::string_view::npos) return std::nullopt;
    std::size_t k = at + tag.size();
    while (k < text.size() && (text[k] == ' ' || text[k] == '\t')) ++k;
    if (k < text.size() && text[k] == ':') return std::make_pair(at, k + 1);
    if (at == 0) return std::nullopt;
    pos = at - 1;
  }
}

const std::regex& code_pattern() {
  static const std::regex re(
      R"(^BLUE\s*=\s*\[?\s*(\d+)\s*\]?\s*,\s*YELLOW\s*=\s*\[?\s*(\d+)\s*\]?\s*,\s*PURPLE\s*=\s*\[?\s*(\d+)\s*\]?$)",
      std::regex::icase);
  return re;
}

const std::regex& number_pattern() {
  static const std::regex re(R"(^\[?\s*(\d{1,6})\s*\]?$)");
  return re;
}

std::optional<Code> match_code(const std::string& value) {
  std::smatch m;
  if (!std::regex_match(value, m, code_pattern())) return std::nullopt;
  Code c{std::stoi(m[1].str()), std::stoi(m[2].str()), std::stoi(m[3].str())};
  if (!c.valid()) return std::nullopt;
  return c;
}

bool is_skip(const std::string& value) {
  std::string v = value;
  if (v.size() >= 2 && v.front() == '[' && v.back() == ']') v = std::string(trim(v.substr(1, v.size() - 2)));
  if (v.size() != 4) return false;
  for (auto& ch : v) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return v == "SKIP";
}

}  // namespace

ParseResult parse_response(std::string_view text, Phase phase, Strategy strategy) {
  ParseResult r;
  const auto choice = last_tag(text, kChoiceTag, text.size());
  if (!choice) {
    r.error = ResponseError::kFormat;
    r.detail = "no <CHOICE>: tag";
    return r;
  }
  auto line_end = text.find('\n', choice->second);
  if (line_end == std::string_view::npos) line_end = text.size();
  auto value_view = trim(text.substr(choice->second, line_end - choice->second));
  if (!value_view.empty() && value_view.back() == '.') value_view = trim(value_view.substr(0, value_view.size() - 1));
  const std::string value(value_view);

  std::optional<Action> action;
  switch (phase) {
    case Phase::kProposal:
      if (auto c = match_code(value)) action = Action::propose(*c);
      break;
    case Phase::kQuestion: {
      std::smatch m;
      if (is_skip(value)) {
        action = Action::skip();
      } else if (std::regex_match(value, m, number_pattern())) {
        action = Action::query(std::stoi(m[1].str()));
      }
      break;
    }
    case Phase::kDeduce:
      if (is_skip(value)) {
        action = Action::skip();
      } else if (auto c = match_code(value)) {
        action = Action::submit(*c);
      }
      break;
    case Phase::kFinished: break;
  }
  if (!action) {
    r.error = ResponseError::kFormat;
    r.detail = "unrecognised choice '" + value + "' for the " + std::string(phase_name(phase)) + " stage";
    return r;
  }

  ParsedAction p{*action, std::nullopt};
  if (strategy == Strategy::kChainOfThought) {
    const auto reasoning = choice->first == 0 ? std::nullopt : last_tag(text, kReasoningTag, choice->first - 1);
    const auto block = reasoning ? trim(text.substr(reasoning->second, choice->first - reasoning->second))
                                 : std::string_view{};
    if (block.empty()) {
      r.error = ResponseError::kMissingReasoning;
      r.detail = reasoning ? "empty <REASONING>: block" : "no <REASONING>: block before the choice";
      return r;
    }
    p.reasoning = std::string(block);
  }
  r.parsed = std::move(p);
  return r;
}

std::string format_response(const Action& action, const std::optional<std::string>& reasoning) {
  std::string out;
  if (reasoning) out = "<REASONING>: " + *reasoning + "\n";
  out += "<CHOICE>: ";
  switch (action.kind) {
    case Action::Kind::kPropose:
    case Action::Kind::kSubmit: out += to_string(action.code); break;
    case Action::Kind::kQuery: out += std::to_string(action.verifier); break;
    case Action::Kind::kSkip: out += "SKIP"; break;
  }
  return out;
}

}  // namespace vericode
