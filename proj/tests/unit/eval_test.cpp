#include <doctest.h>

#include <deque>
#include <set>

#include "vericode/agents/baseline_agents.hpp"
#include "vericode/dsl/parser.hpp"
#include "vericode/eval/audit.hpp"
#include "vericode/eval/judge.hpp"
#include "vericode/service/session.hpp"
#include "vericode/setup/generator.hpp"
#include "vericode/util/fs.hpp"

using namespace vericode;

namespace {

// Replies from a fixed script, then repeats the last one.
struct ScriptedClient : CompletionClient {
  std::deque<std::string> replies;
  std::vector<std::vector<ChatMessage>> seen;
  Completion complete(const std::vector<ChatMessage>& messages) override {
    seen.push_back(messages);
    Completion c;
    c.text = replies.size() > 1 ? replies.front() : replies.back();
    if (replies.size() > 1) replies.pop_front();
    return c;
  }
};

Conclusion claim(std::vector<std::string> rules, int verifier = 1) {
  Conclusion c;
  c.game = "g";
  c.verifier = verifier;
  c.rules = std::move(rules);
  c.extractor = "pattern";
  return c;
}

const Criterion& criterion(const std::string& rule) {
  for (const auto& card : default_catalog().cards()) {
    for (const auto& c : card.criteria) {
      if (c.rule == rule) return c;
    }
  }
  throw std::runtime_error("no criterion " + rule);
}

Transcript play(Agent& agent, const GameSetup& setup, Strategy strategy) {
  GameSession s(setup, default_catalog(), strategy, agent.name(), agent.config());
  agent.reset(s.view(), strategy);
  while (!s.finished()) s.post(agent.respond(s.prompt()).text);
  return s.transcript();
}

}  // namespace

TEST_CASE("a claim of the truth is Correct for every catalog criterion") {
  std::size_t n = 0;
  for (const auto& card : default_catalog().cards()) {
    for (const auto& c : card.criteria) {
      const auto j = judge_deterministic(claim({c.rule}), c);
      REQUIRE(j);
      CHECK_MESSAGE(j->category == Category::kCorrect, c.id);
      ++n;
    }
  }
  CHECK(n > 48 * 2);
}

TEST_CASE("the three judgment categories") {
  const auto& truth = criterion("YELLOW = PURPLE");
  CHECK(judge_deterministic(claim({"YELLOW = PURPLE"}), truth)->category == Category::kCorrect);
  CHECK(judge_deterministic(claim({"YELLOW < PURPLE"}), truth)->category == Category::kIncorrect);
  CHECK(judge_deterministic(claim({"YELLOW = PURPLE", "YELLOW > PURPLE"}), truth)->category == Category::kInclude);
  // Extensional: spelling does not matter, equivalent alternatives collapse.
  CHECK(judge_deterministic(claim({"PURPLE = YELLOW"}), truth)->category == Category::kCorrect);
  CHECK(judge_deterministic(claim({"YELLOW = PURPLE", "PURPLE = YELLOW"}), truth)->category == Category::kCorrect);
  CHECK_FALSE(judge_deterministic(claim({}), truth));
  CHECK_FALSE(judge_deterministic(claim({"YELLOW ~ 3"}), truth));
}

TEST_CASE("equal extensions get equal categories") {
  std::vector<const Criterion*> all;
  for (const auto& card : default_catalog().cards()) {
    for (const auto& c : card.criteria) all.push_back(&c);
  }
  Rng rng(11);
  for (int trial = 0; trial < 400; ++trial) {
    const auto& a = *all[uniform_below(rng, all.size())];
    const auto& b = *all[uniform_below(rng, all.size())];
    const auto& truth = *all[uniform_below(rng, all.size())];
    // Every criterion with a's extension must be judged like a.
    const auto ja = judge_deterministic(claim({a.rule, b.rule}), truth)->category;
    for (const auto* other : all) {
      if (other->extension != a.extension) continue;
      CHECK(judge_deterministic(claim({other->rule, b.rule}), truth)->category == ja);
    }
  }
}

TEST_CASE("extraction golden fixtures") {
  const auto cases = nlohmann::json::parse(read_file(VERICODE_TEST_DATA_DIR "/fixtures/eval/extract_golden.json"));
  REQUIRE(cases.size() >= 10);
  for (const auto& c : cases) {
    const auto got = extract_claims(c["reasoning"].get<std::string>());
    INFO(c["reasoning"].get<std::string>());
    REQUIRE(got.size() == c["expect"].size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].verifier == c["expect"][i]["verifier"].get<int>());
      CHECK(got[i].rules == c["expect"][i]["rules"].get<std::vector<std::string>>());
      CHECK_FALSE(got[i].text.empty());
    }
  }
}

TEST_CASE("answer-only transcripts yield no conclusions") {
  OracleAgent oracle(default_catalog());
  const auto setup = generate_setup(Mode::kClassic, Difficulty::kEasy, 3, default_catalog());
  CHECK(extract_pattern(play(oracle, setup, Strategy::kAnswerOnly)).empty());
}

TEST_CASE("oracle chain-of-thought claims are Correct before submitting") {
  OracleAgent oracle(default_catalog());
  const Catalog& cat = default_catalog();
  for (const Mode mode : {Mode::kClassic, Mode::kNightmare}) {
    for (const auto& setup : generate_batch(mode, 1, 5, cat)) {
      const auto t = play(oracle, setup, Strategy::kChainOfThought);
      REQUIRE(t.outcome()->status == Status::kWon);
      const auto claims = extract_pattern(t);
      REQUIRE_FALSE(claims.empty());
      const auto judged = judge_game(claims, setup, cat);
      // The submit action carries the final claims.
      std::uint64_t submit_seq = 0;
      for (const auto& e : t.events) {
        if (const auto* a = std::get_if<ActionEvent>(&e.body); a && a->action.kind == Action::Kind::kSubmit) {
          submit_seq = e.seq;
        }
      }
      std::set<int> covered;
      for (const auto& j : judged) {
        CHECK(j.category != Category::kIncorrect);  // the solver never excludes the truth
        if (j.conclusion.seq != submit_seq) continue;
        CHECK_MESSAGE(j.category == Category::kCorrect, setup.id, " verifier ", j.conclusion.verifier);
        covered.insert(j.conclusion.verifier);
      }
      CHECK(covered.size() == setup.slots());
    }
  }
}

TEST_CASE("model judge replies") {
  CHECK(parse_judge_reply("reasoning...\nCATEGORY: Correct") == Category::kCorrect);
  CHECK(parse_judge_reply("category: **include**") == Category::kInclude);
  CHECK_FALSE(parse_judge_reply("I think it is correct."));
  CHECK_FALSE(parse_judge_reply("CATEGORY: Correct\nCATEGORY: Incorrect"));

  const auto& truth = criterion("YELLOW = PURPLE");
  auto client = std::make_shared<ScriptedClient>();
  client->replies = {"CATEGORY: Correct"};
  ExternalJudge judge(client, "mock");
  Conclusion free;
  free.verifier = 2;
  free.text = "verifier 2 cares whether the last two digits match";
  const auto j = judge.judge(free, truth);
  CHECK(j.category == Category::kCorrect);
  CHECK(j.judge == "external:mock");
  CHECK_FALSE(j.flagged);

  auto prose = std::make_shared<ScriptedClient>();
  prose->replies = {"It is hard to say, the player seems close."};
  std::vector<ExchangeLog> log;
  const auto u = ExternalJudge(prose, "mock").judge(free, truth, &log);
  CHECK(u.category == Category::kUnresolved);
  CHECK(u.flagged);
  CHECK(prose->seen.size() == 3);
  CHECK(log.size() == 3);
}

TEST_CASE("free-text claims route to the model judge; disagreements are flagged") {
  GameSetup setup;
  setup.id = "fixture";
  setup.card_ids = {"V01", "V13", "V02", "V03"};
  setup.active = {1, 1, 0, 1};
  setup.secret = {2, 3, 3};
  setup.permutation = {0, 1, 2, 3};
  setup.catalog = default_catalog().fingerprint();
  std::vector<Conclusion> claims{claim({"YELLOW = PURPLE"}, 2), claim({}, 2)};
  claims[1].text = "verifier 2 wants the digits to match";

  const auto none = judge_game(claims, setup, default_catalog());
  CHECK(none[0].category == Category::kCorrect);
  CHECK(none[1].category == Category::kUnresolved);
  CHECK(none[1].flagged);

  auto client = std::make_shared<ScriptedClient>();
  client->replies = {"CATEGORY: Incorrect"};
  JudgeOptions opts;
  opts.external = std::make_shared<ExternalJudge>(client, "mock");
  opts.cross_check = true;
  const auto both = judge_game(claims, setup, default_catalog(), opts);
  CHECK(both[0].category == Category::kCorrect);
  CHECK(both[0].flagged);  // model said Incorrect
  CHECK(both[1].category == Category::kIncorrect);
  CHECK(both[1].judge == "external:mock");

  // Out-of-range verifier numbers are wrong claims, not crashes.
  CHECK(judge_game({claim({"BLUE = 1"}, 9)}, setup, default_catalog())[0].category == Category::kIncorrect);
}

TEST_CASE("model extractor") {
  OracleAgent oracle(default_catalog());
  const auto setup = generate_setup(Mode::kClassic, Difficulty::kEasy, 4, default_catalog());
  const auto t = play(oracle, setup, Strategy::kChainOfThought);
  auto client = std::make_shared<ScriptedClient>();
  client->replies = {"Sure. {\"conclusions\": [{\"verifier\": 1, \"rules\": [\"blue = 1\"], \"text\": \"x\"}, "
                     "{\"verifier\": 99, \"rules\": [\"BLUE = 1\"]}]}",
                     "no json here"};
  ExternalExtractor ex(client, "mock", default_catalog());
  std::vector<ExchangeLog> log;
  const auto got = ex.extract(t, public_view(setup), &log);
  REQUIRE_FALSE(got.empty());
  CHECK(got[0].verifier == 1);
  CHECK(got[0].rules == std::vector<std::string>{"BLUE = 1"});
  CHECK(got[0].extractor == "external:mock");
  CHECK(client->seen[0][0].content.find("Verifier 1:") != std::string::npos);
  CHECK(log.size() == client->seen.size());
  CHECK_FALSE(log.back().error.empty());
}

TEST_CASE("judgment files round-trip") {
  auto j = *judge_deterministic(claim({"YELLOW = PURPLE", "YELLOW > PURPLE"}), criterion("YELLOW = PURPLE"));
  j.conclusion.seq = 12;
  j.conclusion.round = 3;
  const auto dir = std::filesystem::temp_directory_path() / "vericode_eval_test";
  std::filesystem::create_directories(dir);
  write_judgments(dir / "j.jsonl", std::vector<Judgment>{j, j});
  const auto back = read_judgments(dir / "j.jsonl");
  REQUIRE(back.size() == 2);
  CHECK(back[0] == j);
  std::filesystem::remove_all(dir);
}

TEST_CASE("audit sampling") {
  std::vector<GameSummary> games;
  for (int i = 0; i < 2400; ++i) {
    GameSummary g;
    g.game = "g" + std::to_string(i);
    g.mode = i % 2 ? Mode::kClassic : Mode::kNightmare;
    g.difficulty = static_cast<Difficulty>(i % 3);
    g.status = i % 5 == 0 ? Status::kWon : Status::kLost;
    games.push_back(g);
  }
  const auto a = sample_audit(games, 0.05, 9);
  CHECK(a.items.size() == 120);
  CHECK(sample_audit(games, 0.05, 9).items == a.items);
  CHECK(sample_audit(games, 0.05, 10).items != a.items);
  std::set<std::string> unique;
  for (const auto& it : a.items) unique.insert(it.game);
  CHECK(unique.size() == 120);

  // Losses are over-represented relative to their share.
  std::size_t won_pool = 0, won_picked = 0;
  for (const auto& g : games) won_pool += g.status == Status::kWon;
  for (const auto& it : a.items) won_picked += it.stratum.find("/won") != std::string::npos;
  CHECK(static_cast<double>(won_picked) / 120.0 < static_cast<double>(won_pool) / 2400.0);

  // No losses: plain proportional sampling.
  for (auto& g : games) g.status = Status::kWon;
  const auto b = sample_audit(games, 0.05, 9);
  CHECK(b.items.size() == 120);
  std::map<std::string, int> per;
  for (const auto& it : b.items) ++per[it.stratum];
  CHECK(per.size() == 6);
  for (const auto& [k, n] : per) CHECK(n == 20);

  CHECK_THROWS_AS(sample_audit({}, 0.05, 1), ConfigError);
  CHECK_THROWS_AS(sample_audit(games, 0, 1), ConfigError);
  CHECK(audit_checklist(a).find("- [ ] ") != std::string::npos);
}
