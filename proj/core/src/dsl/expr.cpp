#include "vericode/dsl/expr.hpp"

#include <algorithm>
#include <array>

#include "vericode/util/overloaded.hpp"

namespace vericode {

std::string_view op_symbol(CmpOp op) {
  switch (op) {
    case CmpOp::kLess: return "<";
    case CmpOp::kEqual: return "=";
    case CmpOp::kGreater: return ">";
    case CmpOp::kLessEqual: return "<=";
    case CmpOp::kGreaterEqual: return ">=";
    case CmpOp::kNotEqual: return "!=";
  }
  return "?";
}

bool apply(CmpOp op, int lhs, int rhs) {
  switch (op) {
    case CmpOp::kLess: return lhs < rhs;
    case CmpOp::kEqual: return lhs == rhs;
    case CmpOp::kGreater: return lhs > rhs;
    case CmpOp::kLessEqual: return lhs <= rhs;
    case CmpOp::kGreaterEqual: return lhs >= rhs;
    case CmpOp::kNotEqual: return lhs != rhs;
  }
  return false;
}

namespace {

int digit_sum(const Code& code, const ColorMask& mask) {
  int total = 0;
  for (Color c : kColors) {
    if (mask.contains(c)) total += code.digit(c);
  }
  return total;
}

std::string render_mask(const ColorMask& mask) {
  if (mask.all()) return "SUM";
  std::string out = "SUM(";
  bool first = true;
  for (Color c : kColors) {
    if (!mask.contains(c)) continue;
    if (!first) out += ',';
    out += color_name(c);
    first = false;
  }
  return out + ")";
}

}  // namespace

bool evaluate(const PredicateExpr& expr, const Code& code) {
  return std::visit(
      Overloaded{
          [&](const CompareNode& n) {
            const int rhs = std::holds_alternative<Color>(n.rhs)
                                ? code.digit(std::get<Color>(n.rhs))
                                : std::get<int>(n.rhs);
            return apply(n.op, code.digit(n.lhs), rhs);
          },
          [&](const SumCompareNode& n) { return apply(n.op, digit_sum(code, n.colors), n.value); },
          [&](const ParityNode& n) {
            const int v = n.subject ? code.digit(*n.subject) : digit_sum(code, ColorMask{});
            return (v % 2 == 0) == n.even;
          },
          [&](const CountOfNode& n) {
            int count = 0;
            for (Color c : kColors) count += code.digit(c) == n.value ? 1 : 0;
            return apply(n.op, count, n.count);
          },
          [&](const CountEvenNode& n) {
            int count = 0;
            for (Color c : kColors) count += code.digit(c) % 2 == 0 ? 1 : 0;
            return apply(n.op, count, n.count);
          },
          [&](const ExtremumNode& n) {
            const int self = code.digit(n.color);
            for (Color c : kColors) {
              if (c == n.color) continue;
              const int other = code.digit(c);
              const bool ok = n.maximum ? (n.strict ? self > other : self >= other)
                                        : (n.strict ? self < other : self <= other);
              if (!ok) return false;
            }
            return true;
          },
          [&](const RepetitionNode& n) {
            std::array<int, 10> seen{};
            int most = 0;
            for (Color c : kColors) {
              const int d = code.digit(c);
              if (d >= 0 && d < 10) most = std::max(most, ++seen[static_cast<std::size_t>(d)]);
            }
            return apply(n.op, most, n.count);
          },
          [&](const OrderingNode& n) {
            const bool asc = code.blue < code.yellow && code.yellow < code.purple;
            const bool desc = code.blue > code.yellow && code.yellow > code.purple;
            switch (n.kind) {
              case OrderKind::kAscending: return asc;
              case OrderKind::kDescending: return desc;
              case OrderKind::kNone: return !asc && !desc;
            }
            return false;
          },
      },
      expr);
}

CodeSet extension(const PredicateExpr& expr) {
  CodeSet set;
  for (const Code& c : enumerate_codes()) {
    if (evaluate(expr, c)) set.set(static_cast<std::size_t>(c.index()));
  }
  return set;
}

std::string render(const PredicateExpr& expr) {
  return std::visit(
      Overloaded{
          [](const CompareNode& n) {
            std::string rhs = std::holds_alternative<Color>(n.rhs)
                                  ? std::string(color_name(std::get<Color>(n.rhs)))
                                  : std::to_string(std::get<int>(n.rhs));
            return std::string(color_name(n.lhs)) + " " + std::string(op_symbol(n.op)) + " " + rhs;
          },
          [](const SumCompareNode& n) {
            return render_mask(n.colors) + " " + std::string(op_symbol(n.op)) + " " +
                   std::to_string(n.value);
          },
          [](const ParityNode& n) {
            const std::string subject = n.subject ? std::string(color_name(*n.subject)) : "SUM";
            return "PARITY(" + subject + ") = " + (n.even ? "EVEN" : "ODD");
          },
          [](const CountOfNode& n) {
            return "COUNT(" + std::to_string(n.value) + ") " + std::string(op_symbol(n.op)) + " " +
                   std::to_string(n.count);
          },
          [](const CountEvenNode& n) {
            return "COUNT_EVEN " + std::string(op_symbol(n.op)) + " " + std::to_string(n.count);
          },
          [](const ExtremumNode& n) {
            return std::string(n.maximum ? "MAX" : "MIN") + " = " + std::string(color_name(n.color)) +
                   (n.strict ? " STRICT" : "");
          },
          [](const RepetitionNode& n) {
            return "REPEATS " + std::string(op_symbol(n.op)) + " " + std::to_string(n.count);
          },
          [](const OrderingNode& n) {
            switch (n.kind) {
              case OrderKind::kAscending: return std::string("ORDER = ASC");
              case OrderKind::kDescending: return std::string("ORDER = DESC");
              case OrderKind::kNone: return std::string("ORDER = NONE");
            }
            return std::string("ORDER = ?");
          },
      },
      expr);
}

}  // namespace vericode
