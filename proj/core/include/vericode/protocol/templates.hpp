#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "vericode/protocol/strategy.hpp"
#include "vericode/setup/setup.hpp"

namespace vericode {

enum class Step : std::uint8_t {
  kSystem,
  kProposal,
  kProposalFormat,
  kQuestionFirst,
  kQuestionFollowing,
  kQuestionLast,
  kQuestionFormat,
  kInvalidVerifier,
  kDeduce,
  kDeduceFormat,
  kDeduceResult,
};

inline constexpr Step kAllSteps[] = {
    Step::kSystem,         Step::kProposal,          Step::kProposalFormat,
    Step::kQuestionFirst,  Step::kQuestionFollowing, Step::kQuestionLast,
    Step::kQuestionFormat, Step::kInvalidVerifier,   Step::kDeduce,
    Step::kDeduceFormat,   Step::kDeduceResult};

/// File stem, e.g. "question_following".
std::string_view step_name(Step step);
std::optional<Step> parse_step(std::string_view text);
/// System and DeduceResult texts do not vary with the strategy.
bool step_depends_on_strategy(Step step);

struct TemplateKey {
  Mode mode = Mode::kClassic;
  Strategy strategy = Strategy::kAnswerOnly;
  Step step = Step::kSystem;
};

/// "classic/oa/proposal.txt" or "classic/system.txt".
std::string template_path(const TemplateKey& key);

using RenderContext = std::map<std::string, std::string, std::less<>>;

/// Missing or empty placeholder values, unknown keys.
class RenderError : public Error {
 public:
  using Error::Error;
};

/// Replaces each {name} placeholder ([a-z_]+ between braces) with its value.
/// Every placeholder needs a non-empty value; extra context entries are fine.
std::string render_text(std::string_view body, const RenderContext& context);

/// The full set of prompt templates, keyed by (mode, strategy, step).
class TemplatePack {
 public:
  /// Templates compiled into the library.
  static const TemplatePack& builtin();
  /// Same layout as the built-in pack: <dir>/<mode>/[<strategy>/]<step>.txt.
  static TemplatePack load_directory(const std::filesystem::path& dir);

  std::string_view body(const TemplateKey& key) const;
  std::string render(const TemplateKey& key, const RenderContext& context) const;
  /// crc32 over every path and body, recorded in transcripts.
  const std::string& checksum() const { return checksum_; }

 private:
  std::map<std::string, std::string, std::less<>> bodies_;
  std::string checksum_;
  void finish();
};

/// Text substituted for {verifier_descriptions}:
///
///   Verifier 1: BLUE compared to 1
///   - BLUE is equal to 1
///   - BLUE is greater than 1
///
/// with a blank line between verifiers.
std::string describe_verifiers(const PublicSetupView& view, const Catalog& catalog);

/// Text substituted for {game_setup}: setup id, verifier count, descriptions.
std::string describe_game_setup(const PublicSetupView& view, const Catalog& catalog);

}  // namespace vericode
