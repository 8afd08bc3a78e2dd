#include <doctest.h>

#include <nlohmann/json.hpp>

#include "vericode/dsl/catalog.hpp"
#include "vericode/dsl/parser.hpp"
#include "vericode/util/rng.hpp"

using namespace vericode;

namespace {

PredicateExpr random_expr(Rng& rng) {
  auto pick = [&](std::uint64_t n) { return static_cast<int>(uniform_below(rng, n)); };
  auto color = [&] { return kColors[static_cast<std::size_t>(pick(3))]; };
  auto op = [&] { return static_cast<CmpOp>(pick(6)); };
  switch (pick(8)) {
    case 0: {
      CompareNode n{color(), op(), 0};
      if (pick(2) == 0) n.rhs = pick(16); else n.rhs = color();
      return n;
    }
    case 1: {
      ColorMask m{pick(2) == 0, pick(2) == 0, pick(2) == 0};
      if (!m.blue && !m.yellow && !m.purple) m.purple = true;
      return SumCompareNode{m, op(), pick(16)};
    }
    case 2: {
      ParityNode n;
      if (pick(2) == 0) n.subject = color();
      n.even = pick(2) == 0;
      return n;
    }
    case 3: return CountOfNode{pick(5) + 1, op(), pick(4)};
    case 4: return CountEvenNode{op(), pick(4)};
    case 5: return ExtremumNode{pick(2) == 0, color(), pick(2) == 0};
    case 6: return RepetitionNode{op(), pick(4)};
    default: return OrderingNode{static_cast<OrderKind>(pick(3))};
  }
}

}  // namespace

TEST_CASE("parse_rule builds the expected nodes") {
  const auto e1 = parse_rule("YELLOW = PURPLE");
  REQUIRE(std::holds_alternative<CompareNode>(e1));
  const auto& c = std::get<CompareNode>(e1);
  CHECK(c.lhs == Color::kYellow);
  CHECK(c.op == CmpOp::kEqual);
  CHECK(std::get<Color>(c.rhs) == Color::kPurple);

  const auto e2 = parse_rule("SUM > 9");
  REQUIRE(std::holds_alternative<SumCompareNode>(e2));
  CHECK(std::get<SumCompareNode>(e2).colors.all());
  CHECK(std::get<SumCompareNode>(e2).op == CmpOp::kGreater);
  CHECK(std::get<SumCompareNode>(e2).value == 9);

  CHECK(std::get<SumCompareNode>(parse_rule("SUM(BLUE,PURPLE) <= 4")).colors ==
        ColorMask{true, false, true});
  CHECK(std::get<ExtremumNode>(parse_rule("MIN = YELLOW STRICT")).strict);
  CHECK(std::get<ParityNode>(parse_rule("PARITY(SUM) = ODD")).subject == std::nullopt);
}

TEST_CASE("parse_rule reports the failing token") {
  try {
    parse_rule("BLUE <=");
    FAIL("expected a syntax error");
  } catch (const RuleSyntaxError& e) {
    CHECK(e.token() == 3);
  }
  CHECK_THROWS_AS(parse_rule("GREEN = 3"), RuleSyntaxError);
  CHECK_THROWS_AS(parse_rule("BLUE ! 3"), RuleSyntaxError);
  CHECK_THROWS_AS(parse_rule("BLUE = 16"), RuleSyntaxError);
  CHECK_THROWS_AS(parse_rule("COUNT(7) = 1"), RuleSyntaxError);
  CHECK_THROWS_AS(parse_rule("blue = 3"), RuleSyntaxError);
  CHECK_THROWS_AS(parse_rule("ORDER = UP"), RuleSyntaxError);
  CHECK_THROWS_AS(parse_rule("SUM(BLUE,BLUE) = 4"), RuleSyntaxError);
  CHECK_THROWS_AS(parse_rule("BLUE = 3 extra"), RuleSyntaxError);
  CHECK_THROWS_AS(parse_rule(""), RuleSyntaxError);
  CHECK_THROWS_AS(parse_rule("BLUE = 3 $"), RuleSyntaxError);
}

TEST_CASE("evaluate on hand examples") {
  const auto yp = parse_rule("YELLOW = PURPLE");
  CHECK_FALSE(evaluate(yp, Code{2, 4, 3}));
  CHECK(evaluate(yp, Code{1, 5, 5}));
  CHECK(evaluate(parse_rule("SUM > 9"), Code{5, 5, 5}));
  CHECK(evaluate(parse_rule("REPEATS = 3"), Code{2, 2, 2}));
  CHECK(evaluate(parse_rule("REPEATS = 1"), Code{1, 2, 3}));
  CHECK(evaluate(parse_rule("MAX = BLUE"), Code{4, 4, 1}));
  CHECK_FALSE(evaluate(parse_rule("MAX = BLUE STRICT"), Code{4, 4, 1}));
  CHECK(evaluate(parse_rule("ORDER = NONE"), Code{1, 1, 2}));
}

TEST_CASE("enumerate_codes is the lexicographic code space") {
  const auto& codes = enumerate_codes();
  REQUIRE(codes.size() == 125);
  CHECK(codes.front() == Code{1, 1, 1});
  CHECK(codes.back() == Code{5, 5, 5});
  for (std::size_t i = 1; i < codes.size(); ++i) CHECK(codes[i - 1] < codes[i]);
  for (int i = 0; i < kCodeCount; ++i) CHECK(Code::from_index(i).index() == i);
}

TEST_CASE("extension sizes") {
  CHECK(extension(parse_rule("YELLOW = PURPLE")).count() == 25);
  CHECK(extension(parse_rule("ORDER = ASC")).count() == 10);
  CHECK(extension(parse_rule("BLUE > 4")).count() == 25);
  // Brute-force count from tests/oracles/rule_oracle.py.
  CHECK(extension(parse_rule("PARITY(SUM) = EVEN")).count() == 62);
}

TEST_CASE("property: extension agrees with evaluate, render round-trips, evaluation is pure") {
  Rng rng(20240601);
  for (int trial = 0; trial < 2000; ++trial) {
    const PredicateExpr e = random_expr(rng);
    const CodeSet ext = extension(e);
    for (const Code& c : enumerate_codes()) {
      REQUIRE(ext.test(static_cast<std::size_t>(c.index())) == evaluate(e, c));
      REQUIRE(evaluate(e, c) == evaluate(e, c));
    }
    const std::string text = render(e);
    const PredicateExpr back = parse_rule(text);
    REQUIRE(back == e);
    REQUIRE(extension(back) == ext);
  }
}

TEST_CASE("default catalog") {
  const Catalog& cat = default_catalog();
  CHECK(cat.cards().size() == 48);
  std::size_t min_n = 99, max_n = 0;
  for (const auto& card : cat.cards()) {
    min_n = std::min(min_n, card.criteria.size());
    max_n = std::max(max_n, card.criteria.size());
    for (std::size_t i = 0; i < card.criteria.size(); ++i) {
      for (std::size_t j = i + 1; j < card.criteria.size(); ++j) {
        CHECK(card.criteria[i].extension != card.criteria[j].extension);
      }
      // No criterion is vacuous in either direction.
      CHECK(card.criteria[i].extension.any());
      CHECK_FALSE(card.criteria[i].extension.all());
    }
  }
  CHECK(min_n == 2);
  CHECK(max_n == 9);

  const auto& yp = cat.card("V13");
  REQUIRE(yp.criteria.size() == 3);
  CHECK(yp.criteria[0].rule == "YELLOW < PURPLE");
  CHECK(yp.criteria[1].rule == "YELLOW = PURPLE");
  CHECK(yp.criteria[2].rule == "YELLOW > PURPLE");
  CHECK(cat.fingerprint() == default_catalog().fingerprint());
}

namespace {
nlohmann::json card_doc(std::vector<std::string> rules, std::string id = "X1") {
  nlohmann::json card{{"id", id}, {"name", "test"}, {"criteria", nlohmann::json::array()}};
  int k = 0;
  for (const auto& r : rules) {
    card["criteria"].push_back({{"id", id + "." + std::to_string(k++)}, {"rule", r}});
  }
  return card;
}
}  // namespace

TEST_CASE("load_catalog validation errors") {
  auto doc = [](nlohmann::json cards) { return nlohmann::json{{"version", "t"}, {"cards", cards}}; };
  CHECK_NOTHROW(load_catalog(doc({card_doc({"BLUE < 3", "BLUE = 3", "BLUE > 3"})})));
  CHECK_THROWS_AS(load_catalog(doc({card_doc({"YELLOW = PURPLE", "PURPLE = YELLOW"})})), CatalogError);
  CHECK_THROWS_AS(load_catalog(doc({card_doc({"BLUE = 1"})})), CatalogError);
  CHECK_THROWS_AS(load_catalog(doc({card_doc({"BLUE = 1", "BLUE = 2", "BLUE = 3", "BLUE = 4",
                                              "BLUE = 5", "SUM = 3", "SUM = 4", "SUM = 5",
                                              "SUM = 6", "SUM = 7"})})),
                  CatalogError);
  CHECK_THROWS_AS(load_catalog(doc({card_doc({"BLUE = 1", "BLUE > 1"}), card_doc({"SUM = 3", "SUM = 4"})})),
                  CatalogError);
  CHECK_THROWS_AS(load_catalog(doc({card_doc({"BLUE = 1", "BLUE >"})})), CatalogError);
  CHECK_THROWS_AS(load_catalog(nlohmann::json{{"cards", 3}}), CatalogError);
}
