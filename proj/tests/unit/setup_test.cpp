#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <map>
#include <set>
#include <nlohmann/json.hpp>

#include "vericode/dsl/parser.hpp"
#include "vericode/setup/generator.hpp"
#include "vericode/util/rng.hpp"

using namespace vericode;

namespace {

std::vector<PredicateExpr> rules(std::initializer_list<const char*> texts) {
  std::vector<PredicateExpr> out;
  for (const char* t : texts) out.push_back(parse_rule(t));
  return out;
}

std::vector<CodeSet> extensions_of(const std::vector<PredicateExpr>& exprs) {
  std::vector<CodeSet> out;
  for (const auto& e : exprs) out.push_back(extension(e));
  return out;
}

// Uniqueness and necessity recomputed from evaluate() alone.
void require_valid_by_oracle(const GameSetup& s, const Catalog& cat) {
  std::vector<PredicateExpr> active;
  for (std::size_t i = 0; i < s.slots(); ++i) active.push_back(active_criterion(s, cat, i).expr);
  const auto all = solve(active);
  REQUIRE(all.count() == 1);
  REQUIRE(all.test(static_cast<std::size_t>(s.secret.index())));
  for (std::size_t i = 0; i < active.size(); ++i) {
    auto rest = active;
    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
    REQUIRE(solve(rest).count() >= 2);
    REQUIRE_FALSE(active_criterion(s, cat, i).extension.all());
  }
}

}  // namespace

TEST_CASE("solve examples") {
  const auto one = solve(rules({"YELLOW = PURPLE", "BLUE > 4", "SUM > 13"}));
  REQUIRE(one.count() == 1);
  CHECK(to_codes(one).front() == Code{5, 5, 5});
  CHECK(solve(rules({"BLUE > 4", "BLUE < 2"})).none());
  // Fixture from tests/oracles/rule_oracle.py.
  CHECK(solve(rules({"PARITY(SUM) = EVEN"})).count() == 62);
}

TEST_CASE("check_extensions witnesses") {
  SUBCASE("two solutions") {
    const auto r = check_extensions(extensions_of(rules({"BLUE = 2", "YELLOW = 4", "PURPLE >= 3", "PURPLE != 4"})));
    CHECK(r.violation == SetupCheck::Violation::kUniqueness);
    CHECK(r.solutions.count() == 2);
    REQUIRE(r.second_solution);
    CHECK(*r.second_solution == Code{2, 4, 5});
  }
  SUBCASE("no solution") {
    const auto r = check_extensions(extensions_of(rules({"BLUE > 4", "BLUE < 2"})));
    CHECK(r.violation == SetupCheck::Violation::kUniqueness);
    CHECK_FALSE(r.second_solution);
  }
  SUBCASE("redundant second card") {
    const auto r = check_extensions(extensions_of(rules({"BLUE = 2", "YELLOW > 3", "YELLOW = 4", "PURPLE = 3"})));
    CHECK(r.violation == SetupCheck::Violation::kNecessity);
    REQUIRE(r.redundant_slot);
    CHECK(*r.redundant_slot == 1);
  }
}

TEST_CASE("check_setup on the oracle fixture") {
  const Catalog& cat = default_catalog();
  std::vector<const VerifierCard*> cards{&cat.card("V41"), &cat.card("V02"), &cat.card("V17"),
                                         &cat.card("V48")};
  const auto r = check_setup({5, 1, 0, 4}, cards);
  REQUIRE(r.valid());
  CHECK(to_codes(r.solutions).front() == Code{3, 5, 1});
}

TEST_CASE("generate_setup is deterministic and valid") {
  const Catalog& cat = default_catalog();
  const auto a = generate_setup(Mode::kClassic, Difficulty::kEasy, 1, cat);
  const auto b = generate_setup(Mode::kClassic, Difficulty::kEasy, 1, cat);
  CHECK(a == b);
  CHECK(a.slots() == 4);
  CHECK(a.permutation == std::vector<std::size_t>{0, 1, 2, 3});
  require_valid_by_oracle(a, cat);
  CHECK_NOTHROW(validate_setup(a, cat));

  const auto n = generate_setup(Mode::kNightmare, Difficulty::kHard, 9, cat);
  CHECK(n.mode == Mode::kNightmare);
  CHECK(n.slots() == 6);
  CHECK(n.permutation.size() == 6);
  require_valid_by_oracle(n, cat);
  CHECK(generate_setup(Mode::kClassic, Difficulty::kMedium, 5, cat).slots() == 5);
}

TEST_CASE("generate_batch counts, ids, validity, byte-identical reruns") {
  const Catalog& cat = default_catalog();
  CHECK(generate_batch(Mode::kNightmare, 1, 3, cat).size() == 3);
  const auto batch = generate_batch(Mode::kClassic, 4, 77, cat);
  REQUIRE(batch.size() == 12);
  std::set<std::string> ids;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    CHECK(batch[i].difficulty == kDifficulties[i / 4]);
    ids.insert(batch[i].id);
    require_valid_by_oracle(batch[i], cat);
  }
  CHECK(ids.size() == 12);
  CHECK(serialize_batch(batch) == serialize_batch(generate_batch(Mode::kClassic, 4, 77, cat)));
  CHECK(serialize_batch(batch) != serialize_batch(generate_batch(Mode::kClassic, 4, 78, cat)));
  CHECK_THROWS_AS(generate_batch(Mode::kClassic, 0, 1, cat), GenerationError);
}

TEST_CASE("exhaustion is reported") {
  // A zero restart budget must fail loudly rather than return a bad setup.
  GeneratorOptions opts;
  opts.max_restarts = 0;
  CHECK_THROWS_AS(generate_setup(Mode::kClassic, Difficulty::kEasy, 1, default_catalog(), opts),
                  GenerationError);
}

TEST_CASE("batch file round trip and public view") {
  const Catalog& cat = default_catalog();
  const auto batch = generate_batch(Mode::kNightmare, 2, 5, cat);
  const auto path = std::filesystem::temp_directory_path() / "vericode_setup_test.jsonl";
  write_batch(path, batch);
  CHECK(read_batch(path) == batch);
  std::filesystem::remove(path);

  const auto j = setup_to_json(batch[0]);
  CHECK(j.contains("secret"));
  auto pub = j;
  pub.erase("secret");
  pub.erase("seed");
  CHECK(pub == public_view_json(public_view(batch[0])));
  const auto text = public_view_json(public_view(batch[0])).dump();
  CHECK(text.find(to_compact(batch[0].secret)) == std::string::npos);

  CHECK_THROWS_AS(parse_batch("{\"id\": 3}\n"), FormatError);
  CHECK_THROWS_AS(parse_batch("not json\n"), FormatError);
  auto bad = setup_to_json(batch[0]);
  bad["secret"]["permutation"][0] = 0;
  CHECK_THROWS_AS(setup_from_json(bad), FormatError);
}

TEST_CASE("validate_setup rejects tampering") {
  const Catalog& cat = default_catalog();
  auto s = generate_setup(Mode::kClassic, Difficulty::kMedium, 11, cat);
  auto t = s;
  t.secret = Code::from_index((s.secret.index() + 1) % kCodeCount);
  CHECK_THROWS_AS(validate_setup(t, cat), FormatError);
  t = s;
  std::swap(t.permutation[0], t.permutation[1]);
  CHECK_THROWS_AS(validate_setup(t, cat), FormatError);
  t = s;
  t.catalog = "other@00000000";
  CHECK_THROWS_AS(validate_setup(t, cat), FormatError);
  t = s;
  t.card_ids.pop_back();
  t.active.pop_back();
  t.permutation.pop_back();
  CHECK_THROWS_AS(validate_setup(t, cat), FormatError);
}

TEST_CASE("sample_permutation is uniform") {
  CHECK(sample_permutation(6, 1).size() == 6);
  CHECK(sample_permutation(4, 42) == sample_permutation(4, 42));
  std::map<std::vector<std::size_t>, int> freq;
  for (int i = 0; i < 24000; ++i) freq[sample_permutation(4, derive_seed(99, "perm", static_cast<std::uint64_t>(i)))]++;
  REQUIRE(freq.size() == 24);
  const double sigma = std::sqrt(24000.0 * (1.0 / 24) * (23.0 / 24));
  double chi2 = 0;
  for (const auto& [perm, n] : freq) {
    CHECK(std::abs(n - 1000) <= 5 * sigma);
    chi2 += (n - 1000.0) * (n - 1000.0) / 1000.0;
  }
  // 23 degrees of freedom; 0.999 quantile is about 49.7.
  CHECK(chi2 < 49.7);
  std::set<std::vector<std::size_t>> six;
  for (int i = 0; i < 5000; ++i) six.insert(sample_permutation(6, static_cast<std::uint64_t>(i)));
  CHECK(six.size() > 690);
}
