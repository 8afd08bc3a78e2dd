#pragma once

#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vericode {

enum class Category : std::uint8_t { kCorrect, kIncorrect, kInclude, kUnresolved };

std::string_view category_name(Category category);  // "correct", "incorrect", "include", "unresolved"
std::optional<Category> parse_category(std::string_view text);

/// One claim about one verifier, pulled out of a reasoning block.
struct Conclusion {
  std::string game;       // setup id of the game within its run
  std::uint64_t seq = 0;  // the action event whose reasoning held the claim
  int round = 0;
  int verifier = 0;       // 1-based, as queried
  std::vector<std::string> rules;  // admitted alternatives as DSL text; empty for free text
  std::string text;       // the source sentence or claim line
  std::string extractor;  // "pattern" or "external:<model>"
  bool operator==(const Conclusion&) const = default;
};

struct Judgment {
  Conclusion conclusion;
  Category category = Category::kUnresolved;
  std::string judge;  // "deterministic" or "external:<model>"
  std::string rationale;
  bool flagged = false;  // needs human audit (judge disagreement, unresolved)
  bool operator==(const Judgment&) const = default;
};

nlohmann::json conclusion_to_json(const Conclusion& c);
Conclusion conclusion_from_json(const nlohmann::json& j);
nlohmann::json judgment_to_json(const Judgment& j);
Judgment judgment_from_json(const nlohmann::json& j);

/// JSONL, one judgment per line.
void write_judgments(const std::filesystem::path& path, std::span<const Judgment> judgments);
std::vector<Judgment> read_judgments(const std::filesystem::path& path);  // FormatError, IoError

}  // namespace vericode
