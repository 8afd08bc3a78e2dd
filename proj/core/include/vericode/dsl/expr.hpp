#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "vericode/dsl/code.hpp"

namespace vericode {

enum class CmpOp : std::uint8_t { kLess, kEqual, kGreater, kLessEqual, kGreaterEqual, kNotEqual };

std::string_view op_symbol(CmpOp op);
bool apply(CmpOp op, int lhs, int rhs);

/// Which colours take part in a sum; all three for the plain "SUM" form.
struct ColorMask {
  bool blue = true;
  bool yellow = true;
  bool purple = true;

  bool contains(Color c) const {
    return c == Color::kBlue ? blue : c == Color::kYellow ? yellow : purple;
  }
  bool all() const { return blue && yellow && purple; }
  bool operator==(const ColorMask&) const = default;
};

// One struct per node kind. Every node is a closed predicate over a Code.

struct CompareNode {
  Color lhs = Color::kBlue;
  CmpOp op = CmpOp::kEqual;
  std::variant<Color, int> rhs = 1;
  bool operator==(const CompareNode&) const = default;
};

struct SumCompareNode {
  ColorMask colors;
  CmpOp op = CmpOp::kEqual;
  int value = 0;
  bool operator==(const SumCompareNode&) const = default;
};

struct ParityNode {
  std::optional<Color> subject;  // nullopt: the sum of all three digits
  bool even = true;
  bool operator==(const ParityNode&) const = default;
};

struct CountOfNode {
  int value = 1;  // digit being counted, 1..5
  CmpOp op = CmpOp::kEqual;
  int count = 0;
  bool operator==(const CountOfNode&) const = default;
};

struct CountEvenNode {
  CmpOp op = CmpOp::kEqual;
  int count = 0;
  bool operator==(const CountEvenNode&) const = default;
};

/// MAX/MIN = colour: the colour's digit is >= (<=) each other digit; strictly
/// greater (smaller) when strict.
struct ExtremumNode {
  bool maximum = true;
  Color color = Color::kBlue;
  bool strict = false;
  bool operator==(const ExtremumNode&) const = default;
};

/// Compares the largest multiplicity of any digit (1: all distinct, 3: triple).
struct RepetitionNode {
  CmpOp op = CmpOp::kEqual;
  int count = 1;
  bool operator==(const RepetitionNode&) const = default;
};

enum class OrderKind : std::uint8_t { kAscending, kDescending, kNone };

/// Strict ordering of BLUE, YELLOW, PURPLE; kNone when neither strictly holds.
struct OrderingNode {
  OrderKind kind = OrderKind::kAscending;
  bool operator==(const OrderingNode&) const = default;
};

using PredicateExpr = std::variant<CompareNode, SumCompareNode, ParityNode, CountOfNode,
                                   CountEvenNode, ExtremumNode, RepetitionNode, OrderingNode>;

bool evaluate(const PredicateExpr& expr, const Code& code);

/// { c in all codes : evaluate(expr, c) }.
CodeSet extension(const PredicateExpr& expr);

/// Canonical rule-DSL text; parse_rule(render(e)) == e.
std::string render(const PredicateExpr& expr);

}  // namespace vericode
