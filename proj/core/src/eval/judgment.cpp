#include "vericode/eval/judgment.hpp"

#include <fstream>
#include <sstream>

#include "vericode/util/error.hpp"
#include "vericode/util/fs.hpp"

namespace vericode {

std::string_view category_name(Category category) {
  switch (category) {
    case Category::kCorrect: return "correct";
    case Category::kIncorrect: return "incorrect";
    case Category::kInclude: return "include";
    case Category::kUnresolved: return "unresolved";
  }
  return "?";
}

std::optional<Category> parse_category(std::string_view text) {
  for (auto c : {Category::kCorrect, Category::kIncorrect, Category::kInclude, Category::kUnresolved}) {
    if (category_name(c) == text) return c;
  }
  return std::nullopt;
}

nlohmann::json conclusion_to_json(const Conclusion& c) {
  return {{"game", c.game},   {"seq", c.seq},   {"round", c.round},          {"verifier", c.verifier},
          {"rules", c.rules}, {"text", c.text}, {"extractor", c.extractor}};
}

Conclusion conclusion_from_json(const nlohmann::json& j) {
  try {
    Conclusion c;
    c.game = j.at("game").get<std::string>();
    c.seq = j.at("seq").get<std::uint64_t>();
    c.round = j.at("round").get<int>();
    c.verifier = j.at("verifier").get<int>();
    c.rules = j.at("rules").get<std::vector<std::string>>();
    c.text = j.at("text").get<std::string>();
    c.extractor = j.at("extractor").get<std::string>();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad conclusion record: ") + e.what());
  }
}

nlohmann::json judgment_to_json(const Judgment& j) {
  auto out = conclusion_to_json(j.conclusion);
  out["category"] = category_name(j.category);
  out["judge"] = j.judge;
  out["rationale"] = j.rationale;
  out["flagged"] = j.flagged;
  return out;
}

Judgment judgment_from_json(const nlohmann::json& j) {
  Judgment out;
  out.conclusion = conclusion_from_json(j);
  try {
    const auto cat = parse_category(j.at("category").get<std::string>());
    if (!cat) throw FormatError("unknown judgment category " + j.at("category").dump());
    out.category = *cat;
    out.judge = j.at("judge").get<std::string>();
    out.rationale = j.at("rationale").get<std::string>();
    out.flagged = j.at("flagged").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad judgment record: ") + e.what());
  }
  return out;
}

void write_judgments(const std::filesystem::path& path, std::span<const Judgment> judgments) {
  std::string text;
  for (const auto& j : judgments) text += judgment_to_json(j).dump() + "\n";
  write_file_atomic(path, text);
}

std::vector<Judgment> read_judgments(const std::filesystem::path& path) {
  std::vector<Judgment> out;
  std::istringstream in(read_file(path));
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      out.push_back(judgment_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::parse_error& e) {
      throw FormatError(path.string() + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace vericode
