#include "vericode/analytics/error_paths.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace vericode {

namespace {

std::string node(std::string_view stage, std::optional<Category> c) {
  return std::string(stage) + ":" + (c ? std::string(category_name(*c)) : std::string("none"));
}

}  // namespace

ErrorPathStats error_paths(std::span<const Judgment> judgments, std::span<const GameSummary> games) {
  ErrorPathStats s;
  std::map<std::string, const GameSummary*> by_game;
  for (const auto& g : games) {
    if (g.strategy != Strategy::kChainOfThought) continue;
    if (g.status == Status::kForfeit) {
      ++s.excluded_forfeits;
      continue;
    }
    if (g.status == Status::kWon || g.status == Status::kLost) by_game[g.game] = &g;
  }
  s.games = by_game.size();

  // (game, verifier) -> round -> (seq, category): the last word per round.
  std::map<std::pair<std::string, int>, std::map<int, std::pair<std::uint64_t, Category>>> seqs;
  for (const auto& j : judgments) {
    if (j.category == Category::kUnresolved) {
      ++s.unresolved;
      continue;
    }
    const auto& c = j.conclusion;
    if (by_game.count(c.game) == 0) continue;
    auto& slot = seqs[{c.game, c.verifier}][c.round];
    if (slot.first <= c.seq) slot = {c.seq, j.category};
  }

  std::map<std::tuple<std::string, std::string>, std::size_t> edges;
  std::set<std::string> with_persistent, with_fic;
  for (const auto& [key, rounds] : seqs) {
    std::vector<std::pair<int, Category>> seq;
    for (const auto& [round, v] : rounds) seq.emplace_back(round, v.second);
    const auto fic = std::find_if(seq.begin(), seq.end(),
                                  [](const auto& p) { return p.second == Category::kIncorrect; });
    if (fic == seq.end()) continue;
    FicPath p;
    p.game = key.first;
    p.verifier = key.second;
    p.fic_round = fic->first;
    if (fic + 1 != seq.end()) p.next = (fic + 1)->second;
    p.before_submit = seq.back().second;
    p.outcome = by_game.at(p.game)->status;
    with_fic.insert(p.game);
    if (p.persistent()) with_persistent.insert(p.game);

    ++s.initial_verifier_errors;
    s.persistence.numerator += p.persistent() ? 1 : 0;
    s.no_final_conclusion.numerator += p.next ? 0 : 1;
    s.next_turn_still_incorrect.numerator += p.next == Category::kIncorrect ? 1 : 0;

    const auto ncs = node("NCS", p.next);
    const auto csbs = node("CSBS", p.before_submit);
    ++edges[{"FIC", ncs}];
    ++edges[{ncs, csbs}];
    ++edges[{csbs, p.outcome == Status::kWon ? "GS:won" : "GS:lost"}];

    // Survival of the error: the k-th later conclusion, given all earlier
    // ones (from the FIC on) were incorrect.
    const auto start = static_cast<std::size_t>(fic - seq.begin());
    for (std::size_t k = 1; start + k < seq.size(); ++k) {
      if (s.persistence_curve.size() < k) s.persistence_curve.push_back({static_cast<int>(k), 0, 0});
      auto& pt = s.persistence_curve[k - 1];
      ++pt.denominator;
      if (seq[start + k].second != Category::kIncorrect) break;
      ++pt.still;
    }
    s.paths.push_back(std::move(p));
  }
  s.persistence.denominator = s.no_final_conclusion.denominator = s.next_turn_still_incorrect.denominator =
      s.initial_verifier_errors;

  for (const auto& [game, g] : by_game) {
    const bool won = g->status == Status::kWon;
    auto& rate = with_persistent.count(game) ? s.success_despite_persistent : s.success_when_no_or_fixed;
    ++rate.denominator;
    rate.numerator += won ? 1 : 0;
  }
  for (const auto& [k, n] : edges) s.flow.push_back({std::get<0>(k), std::get<1>(k), n});
  return s;
}

nlohmann::json error_paths_to_json(const ErrorPathStats& s) {
  auto rate = [](const Rate& r) {
    const auto v = r.value();
    return nlohmann::json{{"numerator", r.numerator},
                          {"denominator", r.denominator},
                          {"value", v ? nlohmann::json(*v) : nlohmann::json()}};
  };
  nlohmann::json flow = nlohmann::json::array();
  for (const auto& e : s.flow) flow.push_back({{"from", e.from}, {"to", e.to}, {"count", e.count}});
  nlohmann::json curve = nlohmann::json::array();
  for (const auto& p : s.persistence_curve) {
    curve.push_back({{"k", p.k}, {"probability", p.probability()}, {"denominator", p.denominator}});
  }
  return {{"games", s.games},
          {"excluded_forfeits", s.excluded_forfeits},
          {"unresolved", s.unresolved},
          {"initial_verifier_errors", s.initial_verifier_errors},
          {"persistence_rate", rate(s.persistence)},
          {"no_final_conclusion_rate", rate(s.no_final_conclusion)},
          {"next_turn_still_incorrect_rate", rate(s.next_turn_still_incorrect)},
          {"success_despite_persistent_errors", rate(s.success_despite_persistent)},
          {"success_when_no_or_fixed_errors", rate(s.success_when_no_or_fixed)},
          {"fic_flow", flow},
          {"persistence_curve", curve}};
}

}  // namespace vericode
