#include "vericode/eval/judge.hpp"

#include <regex>
#include <set>

#include "vericode/dsl/parser.hpp"

namespace vericode {

const Criterion& claim_truth(const GameSetup& setup, const Catalog& catalog, int verifier) {
  if (verifier < 1 || static_cast<std::size_t>(verifier) > setup.slots()) {
    throw FormatError("claim names verifier " + std::to_string(verifier) + " but the game has " +
                      std::to_string(setup.slots()));
  }
  return active_criterion(setup, catalog, setup.permutation[static_cast<std::size_t>(verifier - 1)]);
}

std::optional<Judgment> judge_deterministic(const Conclusion& claim, const Criterion& truth) {
  if (claim.rules.empty()) return std::nullopt;
  std::set<std::string> distinct;  // extensions as bit strings
  try {
    for (const auto& r : claim.rules) distinct.insert(extension(parse_rule(r)).to_string());
  } catch (const Error&) {
    return std::nullopt;
  }
  const bool admits = distinct.count(truth.extension.to_string()) > 0;
  Judgment j;
  j.conclusion = claim;
  j.judge = "deterministic";
  if (admits && distinct.size() == 1) {
    j.category = Category::kCorrect;
    j.rationale = "claim is equivalent to " + truth.rule;
  } else if (admits) {
    j.category = Category::kInclude;
    j.rationale = "truth " + truth.rule + " is one of " + std::to_string(distinct.size()) + " alternatives";
  } else {
    j.category = Category::kIncorrect;
    j.rationale = "no alternative is equivalent to " + truth.rule;
  }
  return j;
}

std::optional<Category> parse_judge_reply(std::string_view reply) {
  static const std::regex tag(R"(CATEGORY\s*:\s*\**\s*(correct|incorrect|include)\b)", std::regex::icase);
  const std::string text(reply);
  std::set<std::string> seen;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), tag); it != std::sregex_iterator(); ++it) {
    std::string w = (*it)[1];
    for (auto& ch : w) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    seen.insert(w);
  }
  if (seen.size() != 1) return std::nullopt;
  return parse_category(*seen.begin());
}

ExternalJudge::ExternalJudge(std::shared_ptr<CompletionClient> client, std::string model, int attempts)
    : client_(std::move(client)), model_(std::move(model)), attempts_(attempts) {}

Judgment ExternalJudge::judge(const Conclusion& claim, const Criterion& truth, std::vector<ExchangeLog>* log) const {
  const std::string system =
      "You compare a player's conclusion about a hidden rule with the true rule. Answer Correct if the "
      "conclusion is equivalent to the true rule, Include if it lists several possibilities and the true rule "
      "is among them, and Incorrect otherwise. End your reply with one line: CATEGORY: Correct, "
      "CATEGORY: Include or CATEGORY: Incorrect.";
  std::string stated = claim.text;
  if (!claim.rules.empty()) {
    stated += "\nAs rules:";
    for (const auto& r : claim.rules) stated += " [" + r + "]";
  }
  const std::string user = "Verifier " + std::to_string(claim.verifier) + "\nConclusion: " + stated +
                           "\nTrue rule: " + truth.description + " (" + truth.rule + ")";
  Judgment j;
  j.conclusion = claim;
  j.judge = identity();
  for (int attempt = 1; attempt <= attempts_; ++attempt) {
    const auto reply = client_->complete({{"system", system}, {"user", user}});
    const auto cat = parse_judge_reply(reply.text);
    if (log != nullptr) log->push_back({user, reply.text, cat ? "" : "no single category in reply"});
    if (cat && *cat != Category::kUnresolved) {
      j.category = *cat;
      j.rationale = reply.text;
      return j;
    }
  }
  j.category = Category::kUnresolved;
  j.rationale = "no category after " + std::to_string(attempts_) + " replies";
  j.flagged = true;
  return j;
}

std::vector<Judgment> judge_game(const std::vector<Conclusion>& claims, const GameSetup& setup,
                                 const Catalog& catalog, const JudgeOptions& options,
                                 std::vector<ExchangeLog>* log) {
  std::vector<Judgment> out;
  for (const auto& c : claims) {
    if (c.verifier < 1 || static_cast<std::size_t>(c.verifier) > setup.slots()) {
      Judgment j;
      j.conclusion = c;
      j.judge = "deterministic";
      j.category = Category::kIncorrect;
      j.rationale = "the game has no verifier " + std::to_string(c.verifier);
      out.push_back(std::move(j));
      continue;
    }
    const auto& truth = claim_truth(setup, catalog, c.verifier);
    auto det = judge_deterministic(c, truth);
    if (det && options.external && options.cross_check) {
      const auto ext = options.external->judge(c, truth, log);
      if (ext.category != det->category) {
        det->flagged = true;
        det->rationale += "; external judge said " + std::string(category_name(ext.category));
      }
    }
    if (det) {
      out.push_back(std::move(*det));
    } else if (options.external) {
      out.push_back(options.external->judge(c, truth, log));
    } else {
      Judgment j;
      j.conclusion = c;
      j.judge = "deterministic";
      j.category = Category::kUnresolved;
      j.rationale = "free-text claim and no model judge configured";
      j.flagged = true;
      out.push_back(std::move(j));
    }
  }
  return out;
}

}  // namespace vericode
