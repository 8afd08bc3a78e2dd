#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <random>

#include "vericode/analytics/export.hpp"
#include "vericode/util/fs.hpp"

using namespace vericode;

namespace {

GameSummary game(std::string id, Status status, int rounds = 0, int queries = 0,
                 Difficulty d = Difficulty::kEasy, Strategy strategy = Strategy::kChainOfThought) {
  GameSummary g;
  g.game = std::move(id);
  g.agent = "fixture";
  g.difficulty = d;
  g.strategy = strategy;
  g.status = status;
  g.reason = status == Status::kWon ? EndReason::kCorrect : status == Status::kLost ? EndReason::kWrong
                                                                                    : EndReason::kRetries;
  g.rounds = rounds;
  g.queries = queries;
  return g;
}

// tests/fixtures/analytics/fic_games.json, loaded as summaries + judgments.
void load_fic_fixture(std::vector<GameSummary>& games, std::vector<Judgment>& judgments) {
  const auto j = nlohmann::json::parse(read_file(VERICODE_TEST_DATA_DIR "/fixtures/analytics/fic_games.json"));
  for (const auto& g : j["games"]) {
    games.push_back(game(g["game"], *parse_status(g["status"].get<std::string>())));
  }
  for (const auto& r : j["judgments"]) {
    Judgment jd;
    jd.conclusion.game = r["game"];
    jd.conclusion.verifier = r["verifier"];
    jd.conclusion.round = r["round"];
    jd.conclusion.seq = r["seq"];
    jd.category = *parse_category(r["category"].get<std::string>());
    jd.judge = "deterministic";
    judgments.push_back(jd);
  }
}

void check_conservation(const ErrorPathStats& s) {
  std::map<std::string, long> in, out;
  for (const auto& e : s.flow) {
    out[e.from] += static_cast<long>(e.count);
    in[e.to] += static_cast<long>(e.count);
  }
  CHECK(out["FIC"] == static_cast<long>(s.initial_verifier_errors));
  for (const auto& [node, n] : in) {
    if (node.rfind("GS:", 0) == 0) continue;
    CHECK_MESSAGE(out[node] == n, node);
  }
}

}  // namespace

TEST_CASE("three-game metrics fixture") {
  // Won in 4 rounds with 6 queries, won in 6 with 8, lost: hand-computed.
  const std::vector<GameSummary> games{game("a", Status::kWon, 4, 6), game("b", Status::kWon, 6, 8),
                                       game("c", Status::kLost, 3, 5)};
  const auto m = compute_metrics(games);
  REQUIRE(m.groups.size() == 1);
  const auto& t = m.groups[0].total;
  CHECK(t.games == 3);
  CHECK(t.wins == 2);
  CHECK(t.accuracy == doctest::Approx(2.0 / 3.0));
  REQUIRE(t.win_avg_turns);
  CHECK(*t.win_avg_turns == 5.0);
  REQUIRE(t.win_avg_verifiers);
  CHECK(*t.win_avg_verifiers == 7.0);
  CHECK(m.groups[0].by_difficulty[0]);
  CHECK_FALSE(m.groups[0].by_difficulty[1]);  // empty stratum is absent, not zero
}

TEST_CASE("all-loss corpus and forfeits") {
  const std::vector<GameSummary> games{game("a", Status::kLost, 2, 1), game("b", Status::kForfeit, 1, 0),
                                       game("c", Status::kInProgress)};
  const auto t = compute_metrics(games).groups.at(0).total;
  CHECK(t.games == 2);
  CHECK(t.accuracy == 0);
  CHECK(t.forfeits == 1);
  CHECK(t.forfeit_rate == 0.5);
  CHECK_FALSE(t.win_avg_turns);
  CHECK_FALSE(t.win_avg_verifiers);
}

TEST_CASE("stratified accuracies recombine and ignore order") {
  std::vector<GameSummary> games;
  std::mt19937 rng(3);
  for (int i = 0; i < 300; ++i) {
    const auto st = rng() % 3 == 0 ? Status::kWon : rng() % 5 == 0 ? Status::kForfeit : Status::kLost;
    games.push_back(game("g" + std::to_string(i), st, 1 + static_cast<int>(rng() % 9),
                         static_cast<int>(rng() % 20), static_cast<Difficulty>(rng() % 3),
                         rng() % 2 ? Strategy::kAnswerOnly : Strategy::kChainOfThought));
  }
  const auto a = metrics_to_json(compute_metrics(games));
  std::shuffle(games.begin(), games.end(), rng);
  CHECK(metrics_to_json(compute_metrics(games)) == a);
  for (const auto& g : compute_metrics(games).groups) {
    std::size_t wins = 0, n = 0;
    double weighted = 0;
    for (const auto& d : g.by_difficulty) {
      if (!d) continue;
      wins += d->wins;
      n += d->games;
      weighted += d->accuracy * static_cast<double>(d->games);
    }
    CHECK(wins == g.total.wins);
    CHECK(n == g.total.games);
    CHECK(weighted / static_cast<double>(n) == doctest::Approx(g.total.accuracy));
  }
}

TEST_CASE("FIC walks from the definition") {
  auto j = [](std::string g, int v, int r, std::uint64_t seq, Category c) {
    Judgment out;
    out.conclusion = {std::move(g), seq, r, v, {}, "", "pattern"};
    out.category = c;
    return out;
  };
  const std::vector<GameSummary> games{game("w", Status::kWon), game("l", Status::kLost)};
  const std::vector<Judgment> js{j("w", 1, 2, 5, Category::kIncorrect), j("w", 1, 4, 9, Category::kCorrect),
                                 j("l", 1, 2, 5, Category::kIncorrect)};
  const auto s = error_paths(js, games);
  REQUIRE(s.paths.size() == 2);
  CHECK(s.paths[1].game == "w");
  CHECK(s.paths[1].next == Category::kCorrect);
  CHECK(s.paths[1].before_submit == Category::kCorrect);
  CHECK(s.paths[0].game == "l");
  CHECK_FALSE(s.paths[0].next);
  CHECK(s.paths[0].before_submit == Category::kIncorrect);
  CHECK(s.paths[0].outcome == Status::kLost);
}

TEST_CASE("six-game error-path fixture") {
  // Expected values: tests/oracles/analytics_oracle.py on the same fixture.
  std::vector<GameSummary> games;
  std::vector<Judgment> judgments;
  load_fic_fixture(games, judgments);
  const auto s = error_paths(judgments, games);

  CHECK(s.games == 5);
  CHECK(s.excluded_forfeits == 1);
  CHECK(s.unresolved == 1);
  CHECK(s.initial_verifier_errors == 6);
  CHECK(s.persistence.numerator == 4);
  CHECK(s.persistence.denominator == 6);
  CHECK(s.no_final_conclusion.numerator == 2);
  CHECK(s.next_turn_still_incorrect.numerator == 2);
  CHECK(s.success_despite_persistent.numerator == 1);
  CHECK(s.success_despite_persistent.denominator == 3);
  CHECK(s.success_when_no_or_fixed.numerator == 2);
  CHECK(s.success_when_no_or_fixed.denominator == 2);

  const std::vector<FlowEdge> flow{
      {"CSBS:correct", "GS:won", 2},     {"CSBS:include", "GS:lost", 1},     {"CSBS:incorrect", "GS:lost", 2},
      {"CSBS:incorrect", "GS:won", 1},   {"FIC", "NCS:correct", 1},          {"FIC", "NCS:include", 1},
      {"FIC", "NCS:incorrect", 2},       {"FIC", "NCS:none", 2},             {"NCS:correct", "CSBS:correct", 1},
      {"NCS:include", "CSBS:include", 1}, {"NCS:incorrect", "CSBS:correct", 1}, {"NCS:incorrect", "CSBS:incorrect", 1},
      {"NCS:none", "CSBS:incorrect", 2}};
  CHECK(s.flow == flow);
  check_conservation(s);

  const std::vector<std::array<std::size_t, 3>> curve{{1, 2, 4}, {2, 1, 2}, {3, 1, 1}, {4, 1, 1}};
  REQUIRE(s.persistence_curve.size() == curve.size());
  for (std::size_t i = 0; i < curve.size(); ++i) {
    CHECK(static_cast<std::size_t>(s.persistence_curve[i].k) == curve[i][0]);
    CHECK(s.persistence_curve[i].still == curve[i][1]);
    CHECK(s.persistence_curve[i].denominator == curve[i][2]);
    if (i > 0) CHECK(s.persistence_curve[i].denominator <= s.persistence_curve[i - 1].denominator);
  }

  // Pure function of the multisets.
  std::reverse(judgments.begin(), judgments.end());
  std::reverse(games.begin(), games.end());
  CHECK(error_paths_to_json(error_paths(judgments, games)) == error_paths_to_json(s));
}

TEST_CASE("no FICs leaves error rates absent") {
  const std::vector<GameSummary> games{game("a", Status::kWon), game("b", Status::kLost)};
  const auto s = error_paths({}, games);
  CHECK(s.initial_verifier_errors == 0);
  CHECK_FALSE(s.persistence.value());
  CHECK_FALSE(s.success_despite_persistent.value());
  REQUIRE(s.success_when_no_or_fixed.value());
  CHECK(*s.success_when_no_or_fixed.value() == 0.5);
}

TEST_CASE("persistence of a four-FIC fixture") {
  // 3 of 4 FICs never corrected.
  std::vector<Judgment> js;
  std::vector<GameSummary> games;
  for (int g = 0; g < 4; ++g) {
    const auto id = "p" + std::to_string(g);
    games.push_back(game(id, Status::kLost));
    Judgment j;
    j.conclusion = {id, 1, 1, 1, {}, "", "pattern"};
    j.category = Category::kIncorrect;
    js.push_back(j);
    if (g == 0) {
      j.conclusion.round = 2;
      j.conclusion.seq = 2;
      j.category = Category::kCorrect;
      js.push_back(j);
    }
  }
  CHECK(*error_paths(js, games).persistence.value() == 0.75);
}

TEST_CASE("exports") {
  const std::vector<GameSummary> games{game("a", Status::kWon, 4, 6), game("b", Status::kWon, 6, 8),
                                       game("c", Status::kLost, 3, 5)};
  const auto csv = export_metrics(compute_metrics(games), ExportFormat::kCsv);
  CHECK(csv ==
        "agent,mode,strategy,difficulty,games,wins,accuracy,win_avg_turns,win_avg_verifiers,forfeits,forfeit_rate,"
        "format_errors,illegal_actions\n"
        "fixture,classic,cot,total,3,2,0.666667,5,7,0,0,0,0\n"
        "fixture,classic,cot,easy,3,2,0.666667,5,7,0,0,0,0\n");

  std::vector<GameSummary> fg;
  std::vector<Judgment> fj;
  load_fic_fixture(fg, fj);
  const auto s = error_paths(fj, fg);
  const auto flow = export_flow(s, ExportFormat::kTsv);
  CHECK(flow.rfind("stage_from\tstage_to\tcount\nCSBS:correct\tGS:won\t2\n", 0) == 0);
  CHECK(export_persistence(s, ExportFormat::kCsv) == "k,probability,denominator\n1,0.5,4\n2,0.5,2\n3,1,1\n4,1,1\n");
  const auto t4 = nlohmann::json::parse(export_table4(s, ExportFormat::kJson));
  CHECK(t4[1]["field"] == "persistence_rate");
  CHECK(t4[1]["value"] == doctest::Approx(4.0 / 6.0));
  CHECK(t4[0]["value"].is_null());
  CHECK_THROWS_AS(parse_export_format("xml"), ConfigError);
}

TEST_CASE("summaries round-trip") {
  auto g = game("x", Status::kWon, 3, 4, Difficulty::kHard);
  g.submitted = Code{1, 2, 3};
  CHECK(summary_from_json(summary_to_json(g)) == g);
  CHECK_THROWS_AS(summary_from_json({{"game", "x"}}), FormatError);
}
