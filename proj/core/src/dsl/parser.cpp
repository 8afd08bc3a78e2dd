#include "vericode/dsl/parser.hpp"

#include <cctype>
#include <charconv>
#include <vector>

namespace vericode {

RuleSyntaxError::RuleSyntaxError(std::string message, std::size_t token, std::size_t column)
    : Error("rule syntax error at token " + std::to_string(token) + " (column " +
            std::to_string(column) + "): " + message),
      token_(token),
      column_(column) {}

namespace {

enum class TokKind { kWord, kInt, kOp, kLParen, kRParen, kComma, kEnd };

struct Token {
  TokKind kind;
  std::string_view text;
  std::size_t column;
};

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const char ch = text[i];
    if (ch == ' ' || ch == '\t') {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (std::isupper(static_cast<unsigned char>(ch)) || ch == '_') {
      while (i < text.size() &&
             (std::isupper(static_cast<unsigned char>(text[i])) || text[i] == '_')) {
        ++i;
      }
      out.push_back({TokKind::kWord, text.substr(start, i - start), start});
    } else if (std::isdigit(static_cast<unsigned char>(ch))) {
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
      out.push_back({TokKind::kInt, text.substr(start, i - start), start});
    } else if (ch == '<' || ch == '>' || ch == '!') {
      i += (i + 1 < text.size() && text[i + 1] == '=') ? 2 : 1;
      out.push_back({TokKind::kOp, text.substr(start, i - start), start});
    } else if (ch == '=') {
      ++i;
      out.push_back({TokKind::kOp, text.substr(start, 1), start});
    } else if (ch == '(') {
      ++i;
      out.push_back({TokKind::kLParen, text.substr(start, 1), start});
    } else if (ch == ')') {
      ++i;
      out.push_back({TokKind::kRParen, text.substr(start, 1), start});
    } else if (ch == ',') {
      ++i;
      out.push_back({TokKind::kComma, text.substr(start, 1), start});
    } else {
      throw RuleSyntaxError("unexpected character '" + std::string(1, ch) + "'", out.size() + 1,
                            start);
    }
  }
  out.push_back({TokKind::kEnd, {}, text.size()});
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : tokens_(tokenize(text)) {}

  PredicateExpr parse() {
    PredicateExpr expr = parse_expr();
    if (peek().kind != TokKind::kEnd) fail("unexpected trailing input");
    return expr;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }

  const Token& next() {
    const Token& t = tokens_[pos_];
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return t;
  }

  [[noreturn]] void fail(const std::string& what) const {
    const Token& t = peek();
    const std::string found = t.kind == TokKind::kEnd ? "end of input" : "'" + std::string(t.text) + "'";
    throw RuleSyntaxError(what + ", found " + found, pos_ + 1, t.column);
  }

  void expect(TokKind kind, std::string_view what) {
    if (peek().kind != kind) fail("expected " + std::string(what));
    next();
  }

  void expect_word(std::string_view word) {
    if (peek().kind != TokKind::kWord || peek().text != word) fail("expected " + std::string(word));
    next();
  }

  void expect_equals() {
    if (peek().kind != TokKind::kOp || peek().text != "=") fail("expected '='");
    next();
  }

  CmpOp parse_op() {
    if (peek().kind != TokKind::kOp) fail("expected comparison operator");
    const std::string_view t = peek().text;
    CmpOp op;
    if (t == "<") op = CmpOp::kLess;
    else if (t == "=") op = CmpOp::kEqual;
    else if (t == ">") op = CmpOp::kGreater;
    else if (t == "<=") op = CmpOp::kLessEqual;
    else if (t == ">=") op = CmpOp::kGreaterEqual;
    else if (t == "!=") op = CmpOp::kNotEqual;
    else fail("unknown operator");
    next();
    return op;
  }

  int parse_int() {
    if (peek().kind != TokKind::kInt) fail("expected integer");
    const std::string_view t = peek().text;
    int value = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc{} || ptr != t.data() + t.size() || value < 0 || value > 15) {
      fail("integer out of range 0..15");
    }
    next();
    return value;
  }

  Color parse_color() {
    if (peek().kind != TokKind::kWord) fail("expected colour");
    const auto color = color_from_name(peek().text);
    if (!color) fail("unknown colour");
    next();
    return *color;
  }

  PredicateExpr parse_expr() {
    const Token& head = peek();
    if (head.kind != TokKind::kWord) fail("expected colour or keyword");
    if (auto color = color_from_name(head.text)) {
      next();
      CompareNode node{*color, parse_op(), 0};
      if (peek().kind == TokKind::kInt) {
        node.rhs = parse_int();
      } else if (peek().kind == TokKind::kWord) {
        node.rhs = parse_color();
      } else {
        fail("expected colour or integer");
      }
      return node;
    }
    const std::string_view kw = head.text;
    if (kw == "SUM") {
      next();
      SumCompareNode node;
      if (peek().kind == TokKind::kLParen) {
        next();
        node.colors = ColorMask{false, false, false};
        for (;;) {
          const Color c = parse_color();
          if (node.colors.contains(c)) fail("colour listed twice");
          (c == Color::kBlue ? node.colors.blue
                             : c == Color::kYellow ? node.colors.yellow : node.colors.purple) = true;
          if (peek().kind == TokKind::kComma) {
            next();
            continue;
          }
          break;
        }
        expect(TokKind::kRParen, "')'");
      }
      node.op = parse_op();
      node.value = parse_int();
      return node;
    }
    if (kw == "PARITY") {
      next();
      expect(TokKind::kLParen, "'('");
      ParityNode node;
      if (peek().kind == TokKind::kWord && peek().text == "SUM") {
        next();
      } else {
        node.subject = parse_color();
      }
      expect(TokKind::kRParen, "')'");
      expect_equals();
      if (peek().kind == TokKind::kWord && peek().text == "EVEN") {
        node.even = true;
      } else if (peek().kind == TokKind::kWord && peek().text == "ODD") {
        node.even = false;
      } else {
        fail("expected EVEN or ODD");
      }
      next();
      return node;
    }
    if (kw == "COUNT") {
      next();
      expect(TokKind::kLParen, "'('");
      CountOfNode node;
      node.value = parse_int();
      if (node.value < kMinDigit || node.value > kMaxDigit) {
        pos_ -= 1;
        fail("counted digit must be 1..5");
      }
      expect(TokKind::kRParen, "')'");
      node.op = parse_op();
      node.count = parse_int();
      return node;
    }
    if (kw == "COUNT_EVEN") {
      next();
      CountEvenNode node;
      node.op = parse_op();
      node.count = parse_int();
      return node;
    }
    if (kw == "MAX" || kw == "MIN") {
      next();
      ExtremumNode node;
      node.maximum = kw == "MAX";
      expect_equals();
      node.color = parse_color();
      if (peek().kind == TokKind::kWord && peek().text == "STRICT") {
        next();
        node.strict = true;
      }
      return node;
    }
    if (kw == "REPEATS") {
      next();
      RepetitionNode node;
      node.op = parse_op();
      node.count = parse_int();
      return node;
    }
    if (kw == "ORDER") {
      next();
      expect_equals();
      OrderingNode node;
      if (peek().kind != TokKind::kWord) fail("expected ASC, DESC or NONE");
      if (peek().text == "ASC") node.kind = OrderKind::kAscending;
      else if (peek().text == "DESC") node.kind = OrderKind::kDescending;
      else if (peek().text == "NONE") node.kind = OrderKind::kNone;
      else fail("expected ASC, DESC or NONE");
      next();
      return node;
    }
    fail("unknown colour or keyword");
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace

PredicateExpr parse_rule(std::string_view text) { return Parser(text).parse(); }

}  // namespace vericode
