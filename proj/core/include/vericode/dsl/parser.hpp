#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "vericode/dsl/expr.hpp"
#include "vericode/util/error.hpp"

namespace vericode {

/// Rule text that does not conform to the grammar.
///
/// token() is the 1-based index of the offending token, where the end of input
/// counts as one token ("BLUE <=" fails at token 3). column() is the 0-based
/// character offset.
class RuleSyntaxError : public Error {
 public:
  RuleSyntaxError(std::string message, std::size_t token, std::size_t column);

  std::size_t token() const { return token_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t token_;
  std::size_t column_;
};

/// Parses one rule of the grammar
///
///   expr  := cmp | agg
///   cmp   := COLOR OP (COLOR | INT)
///   agg   := SUM [ "(" COLOR { "," COLOR } ")" ] OP INT
///          | "PARITY" "(" (COLOR | "SUM") ")" "=" ("EVEN" | "ODD")
///          | "COUNT" "(" INT ")" OP INT
///          | "COUNT_EVEN" OP INT
///          | ("MAX" | "MIN") "=" COLOR [ "STRICT" ]
///          | "REPEATS" OP INT
///          | "ORDER" "=" ("ASC" | "DESC" | "NONE")
///   COLOR := "BLUE" | "YELLOW" | "PURPLE"
///   OP    := "<" | "=" | ">" | "<=" | ">=" | "!="
///   INT   := 0..15
///
/// Keywords are upper case. The parenthesised colour list after SUM restricts
/// the sum to those colours.
PredicateExpr parse_rule(std::string_view text);

}  // namespace vericode
