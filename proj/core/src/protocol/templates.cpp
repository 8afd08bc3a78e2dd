#include "vericode/protocol/templates.hpp"

#include <fstream>
#include <sstream>

#include "vericode/util/assets.hpp"
#include "vericode/util/checksum.hpp"

namespace vericode {

std::string_view step_name(Step step) {
  switch (step) {
    case Step::kSystem: return "system";
    case Step::kProposal: return "proposal";
    case Step::kProposalFormat: return "proposal_format";
    case Step::kQuestionFirst: return "question_first";
    case Step::kQuestionFollowing: return "question_following";
    case Step::kQuestionLast: return "question_last";
    case Step::kQuestionFormat: return "question_format";
    case Step::kInvalidVerifier: return "invalid_verifier";
    case Step::kDeduce: return "deduce";
    case Step::kDeduceFormat: return "deduce_format";
    case Step::kDeduceResult: return "deduce_result";
  }
  return "?";
}

std::optional<Step> parse_step(std::string_view text) {
  for (auto s : kAllSteps) {
    if (step_name(s) == text) return s;
  }
  return std::nullopt;
}

bool step_depends_on_strategy(Step step) {
  return step != Step::kSystem && step != Step::kDeduceResult;
}

std::string template_path(const TemplateKey& key) {
  std::string p(mode_name(key.mode));
  p += '/';
  if (step_depends_on_strategy(key.step)) {
    p += strategy_name(key.strategy);
    p += '/';
  }
  p += step_name(key.step);
  p += ".txt";
  return p;
}

std::string render_text(std::string_view body, const RenderContext& context) {
  std::string out;
  out.reserve(body.size() + 256);
  std::size_t i = 0;
  while (i < body.size()) {
    if (body[i] == '{') {
      std::size_t j = i + 1;
      while (j < body.size() && ((body[j] >= 'a' && body[j] <= 'z') || body[j] == '_')) ++j;
      if (j > i + 1 && j < body.size() && body[j] == '}') {
        const auto name = body.substr(i + 1, j - i - 1);
        const auto it = context.find(name);
        if (it == context.end()) throw RenderError("no value for placeholder {" + std::string(name) + "}");
        if (it->second.empty()) throw RenderError("empty value for placeholder {" + std::string(name) + "}");
        out += it->second;
        i = j + 1;
        continue;
      }
    }
    out += body[i++];
  }
  return out;
}

const TemplatePack& TemplatePack::builtin() {
  static const TemplatePack pack = [] {
    TemplatePack p;
    for (auto mode : {Mode::kClassic, Mode::kNightmare}) {
      for (auto strat : {Strategy::kAnswerOnly, Strategy::kChainOfThought}) {
        for (auto step : kAllSteps) {
          const auto path = template_path({mode, strat, step});
          p.bodies_.emplace(path, std::string(embedded_asset("templates/" + path)));
        }
      }
    }
    p.finish();
    return p;
  }();
  return pack;
}

TemplatePack TemplatePack::load_directory(const std::filesystem::path& dir) {
  TemplatePack p;
  for (auto mode : {Mode::kClassic, Mode::kNightmare}) {
    for (auto strat : {Strategy::kAnswerOnly, Strategy::kChainOfThought}) {
      for (auto step : kAllSteps) {
        const auto path = template_path({mode, strat, step});
        if (p.bodies_.count(path) != 0) continue;
        std::ifstream in(dir / path, std::ios::binary);
        if (!in) throw IoError("template pack is missing " + (dir / path).string());
        std::ostringstream ss;
        ss << in.rdbuf();
        p.bodies_.emplace(path, ss.str());
      }
    }
  }
  p.finish();
  return p;
}

void TemplatePack::finish() {
  std::uint32_t crc = 0;
  for (const auto& [path, body] : bodies_) {
    crc = crc32(path, crc);
    crc = crc32(body, crc);
  }
  checksum_ = hex32(crc);
}

std::string_view TemplatePack::body(const TemplateKey& key) const {
  const auto it = bodies_.find(template_path(key));
  if (it == bodies_.end()) throw RenderError("unknown template " + template_path(key));
  return it->second;
}

std::string TemplatePack::render(const TemplateKey& key, const RenderContext& context) const {
  try {
    return render_text(body(key), context);
  } catch (const RenderError& e) {
    throw RenderError(template_path(key) + ": " + e.what());
  }
}

std::string describe_verifiers(const PublicSetupView& view, const Catalog& catalog) {
  std::string out;
  for (std::size_t i = 0; i < view.card_ids.size(); ++i) {
    const auto& card = catalog.card(view.card_ids[i]);
    if (i > 0) out += "\n\n";
    out += "Verifier " + std::to_string(i + 1) + ": " + card.name;
    for (const auto& c : card.criteria) out += "\n- " + c.description;
  }
  return out;
}

std::string describe_game_setup(const PublicSetupView& view, const Catalog& catalog) {
  return "Game Setup ID: " + view.id + "\nNumber of Verifiers: " +
         std::to_string(view.card_ids.size()) + "\n\n" + describe_verifiers(view, catalog);
}

}  // namespace vericode
