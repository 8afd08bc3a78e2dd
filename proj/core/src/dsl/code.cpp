#include "vericode/dsl/code.hpp"

namespace vericode {

std::string_view color_name(Color color) {
  switch (color) {
    case Color::kBlue: return "BLUE";
    case Color::kYellow: return "YELLOW";
    case Color::kPurple: return "PURPLE";
  }
  return "?";
}

std::optional<Color> color_from_name(std::string_view name) {
  for (Color c : kColors) {
    if (color_name(c) == name) return c;
  }
  return std::nullopt;
}

std::string to_string(const Code& code) {
  return "BLUE=" + std::to_string(code.blue) + ", YELLOW=" + std::to_string(code.yellow) +
         ", PURPLE=" + std::to_string(code.purple);
}

std::string to_compact(const Code& code) {
  return std::to_string(code.blue) + std::to_string(code.yellow) + std::to_string(code.purple);
}

std::optional<Code> parse_compact(std::string_view text) {
  if (text.size() != 3) return std::nullopt;
  Code code{text[0] - '0', text[1] - '0', text[2] - '0'};
  if (!code.valid()) return std::nullopt;
  return code;
}

const std::vector<Code>& enumerate_codes() {
  static const std::vector<Code> codes = [] {
    std::vector<Code> out;
    out.reserve(kCodeCount);
    for (int i = 0; i < kCodeCount; ++i) out.push_back(Code::from_index(i));
    return out;
  }();
  return codes;
}

std::vector<Code> to_codes(const CodeSet& set) {
  std::vector<Code> out;
  for (int i = 0; i < kCodeCount; ++i) {
    if (set.test(static_cast<std::size_t>(i))) out.push_back(Code::from_index(i));
  }
  return out;
}

}  // namespace vericode
