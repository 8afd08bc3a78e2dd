#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "vericode/engine/transcript.hpp"
#include "vericode/protocol/prompts.hpp"
#include "vericode/protocol/response.hpp"
#include "vericode/protocol/retry.hpp"
#include "vericode/util/rng.hpp"
#include "../support/protocol_cases.hpp"

using namespace vericode;
using namespace vericode::testing;

namespace {

const std::filesystem::path kData = VERICODE_TEST_DATA_DIR;

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string golden(const std::string& name) { return slurp(kData / "golden" / "protocol" / (name + ".txt")); }

}  // namespace

TEST_CASE("every template and composed prompt renders byte-identical to its golden file") {
  const auto cases = golden_cases();
  for (const auto& c : cases) {
    CAPTURE(c.name);
    CHECK(c.rendered == golden(c.name));
  }
  CHECK(cases.size() == 40 + 2 * 2 * 7 + 2 * 2);  // 40 templates, then composed prompts
}

TEST_CASE("render examples and errors") {
  const auto& pack = TemplatePack::builtin();
  const auto following = pack.render({Mode::kClassic, Strategy::kAnswerOnly, Step::kQuestionFollowing},
                                     {{"verifier_num", "2"}, {"verifier_result", "FAIL"}});
  CHECK(following.find("You chose Verifier <2> and the result is <FAIL>.") != std::string::npos);
  const auto result = pack.render({Mode::kClassic, Strategy::kAnswerOnly, Step::kDeduceResult},
                                  {{"submitted_code", "S"}, {"answer", "A"}, {"is_correct", "C"}});
  CHECK(result == "The final guess is S. The answer is A, the guess is C.");
  CHECK_THROWS_AS(pack.render({Mode::kClassic, Strategy::kAnswerOnly, Step::kSystem}, {{"game_setup", ""}}),
                  RenderError);
  CHECK_THROWS_AS(pack.render({Mode::kClassic, Strategy::kAnswerOnly, Step::kSystem}, {}), RenderError);
  CHECK(render_text("a {x} b {not a placeholder} {Y}", {{"x", "1"}}) == "a 1 b {not a placeholder} {Y}");
  CHECK(pack.render({Mode::kNightmare, Strategy::kChainOfThought, Step::kProposal}, {}) ==
        pack.render({Mode::kNightmare, Strategy::kChainOfThought, Step::kProposal}, {}));
  CHECK(pack.checksum().size() == 8);
}

TEST_CASE("template pack loads from a directory with the same checksum") {
  const auto dir = std::filesystem::path(VERICODE_TEST_DATA_DIR) / ".." / "core" / "assets" / "templates";
  const auto pack = TemplatePack::load_directory(dir);
  CHECK(pack.checksum() == TemplatePack::builtin().checksum());
  CHECK_THROWS_AS(TemplatePack::load_directory(std::filesystem::temp_directory_path() / "no_such_pack"), IoError);
}

TEST_CASE("response fixtures") {
  int malformed = 0;
  for (const auto& c : response_cases(kData)) {
    CAPTURE(c.text);
    CHECK(check_response(c) == "");
    malformed += c.group == "malformed";
  }
  CHECK(malformed >= 20);
}

TEST_CASE("property: canonical responses round-trip") {
  Rng rng(5);
  for (int i = 0; i < 500; ++i) {
    const Code code = Code::from_index(static_cast<int>(uniform_below(rng, kCodeCount)));
    const int v = 1 + static_cast<int>(uniform_below(rng, 6));
    const std::optional<std::string> why = "step " + std::to_string(i);
    const std::pair<Action, Phase> cases[] = {{Action::propose(code), Phase::kProposal},
                                              {Action::query(v), Phase::kQuestion},
                                              {Action::skip(), Phase::kQuestion},
                                              {Action::skip(), Phase::kDeduce},
                                              {Action::submit(code), Phase::kDeduce}};
    for (const auto& [action, phase] : cases) {
      const auto oa = parse_response(format_response(action), phase, Strategy::kAnswerOnly);
      REQUIRE(oa.ok());
      CHECK(oa.parsed->action == action);
      const auto cot = parse_response(format_response(action, why), phase, Strategy::kChainOfThought);
      REQUIRE(cot.ok());
      CHECK(*cot.parsed == ParsedAction{action, why});
    }
  }
}

TEST_CASE("property: parsing is total") {
  Rng rng(6);
  const std::string alphabet = "<>CHOICE:REASONING BLUEYELLOWPURPLE=,[]0123456789SKIPskip.\n\t*";
  for (int i = 0; i < 5000; ++i) {
    std::string s;
    const auto len = uniform_below(rng, 60);
    for (std::uint64_t k = 0; k < len; ++k) s += alphabet[uniform_below(rng, alphabet.size())];
    if (uniform_below(rng, 2) == 0) s = "<CHOICE>: " + s;
    for (Phase p : {Phase::kProposal, Phase::kQuestion, Phase::kDeduce}) {
      for (Strategy st : {Strategy::kAnswerOnly, Strategy::kChainOfThought}) {
        ParseResult r;
        REQUIRE_NOTHROW(r = parse_response(s, p, st));
        REQUIRE(r.ok() != r.error.has_value());
      }
    }
  }
}

TEST_CASE("retry policy") {
  RetryLedger ledger;
  auto d = retry(ledger, RetryError::kFormat, Phase::kProposal, Mode::kClassic, Strategy::kAnswerOnly, 0);
  CHECK_FALSE(d.give_up);
  CHECK(d.prompt.find("You did not follow the required response format") != std::string::npos);
  CHECK(d.prompt == TemplatePack::builtin().body({Mode::kClassic, Strategy::kAnswerOnly, Step::kProposalFormat}));

  d = retry(ledger, RetryError::kInvalidVerifier, Phase::kQuestion, Mode::kClassic, Strategy::kAnswerOnly, 7);
  CHECK(d.prompt.find("You selected Verifier <7>, which is not a valid verifier number") != std::string::npos);
  CHECK(d.consecutive == 2);

  d = retry(ledger, RetryError::kMissingReasoning, Phase::kDeduce, Mode::kNightmare, Strategy::kChainOfThought, 0);
  CHECK(d.prompt == TemplatePack::builtin().body({Mode::kNightmare, Strategy::kChainOfThought, Step::kDeduceFormat}));
  CHECK_FALSE(d.give_up);
  d = retry(ledger, RetryError::kFormat, Phase::kDeduce, Mode::kNightmare, Strategy::kChainOfThought, 0);
  CHECK(d.give_up);
  CHECK(d.consecutive == 4);
  CHECK(ledger.totals() == RetryLedger::Counters{3, 1});
  CHECK(ledger.phase(Phase::kQuestion).illegal_actions == 1);
  CHECK(ledger.phase(Phase::kDeduce).format_errors == 2);

  RetryLedger streaks;
  for (int i = 0; i < 10; ++i) {
    CHECK_FALSE(retry(streaks, RetryError::kFormat, Phase::kQuestion, Mode::kClassic, Strategy::kAnswerOnly, 0).give_up);
    streaks.clear_streak();
  }
  CHECK(streaks.totals().format_errors == 10);
}

TEST_CASE("game setup description lists verifiers in slot order") {
  const auto text = describe_game_setup(fixture_view(Mode::kClassic), default_catalog());
  CHECK(text.rfind("Game Setup ID: fixture\nNumber of Verifiers: 4\n\nVerifier 1: ", 0) == 0);
  CHECK(text.find("Verifier 2: ") < text.find("Verifier 3: "));
  CHECK(text.find("- YELLOW is equal to PURPLE") != std::string::npos);
}
