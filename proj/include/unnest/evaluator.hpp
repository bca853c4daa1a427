#pragma once

#include "unnest/ast.hpp"
#include "unnest/value.hpp"
#include "unnest/workbook.hpp"

#include <map>
#include <set>

namespace unnest {

// One evaluation pass over a fixed workbook state: demand-driven recursion
// with per-pass memoization and an in-progress set for cycle detection.
// Formula-level failures come back as ErrorVal results, never exceptions.
class Evaluator {
  public:
    explicit Evaluator(const Workbook& wb) : wb_(wb) {}

    Value cell(const CellAddress& addr);
    Value expr(const Expr& e, const std::string& context_sheet = "Sheet1");
    Value expr(const ExprPtr& e, const std::string& context_sheet = "Sheet1");

  private:
    struct Rect {
        std::string sheet;
        int col1, row1, col2, row2;
    };

    Value eval(const Expr& e, const std::string& sheet);
    Value eval_binary(const BinaryOp& op, const std::string& sheet);
    Value eval_unary(const UnaryOp& op, const std::string& sheet);
    Value eval_call(const FuncCall& call, const std::string& sheet);
    Value eval_lookup(const FuncCall& call, const std::string& sheet, bool vertical);
    Value compare(BinaryOpKind op, const Value& a, const Value& b);
    Value arithmetic(BinaryOpKind op, const Value& a, const Value& b);
    Value to_condition(const Value& v); // boolean coercion used by IF/AND/OR/NOT
    std::optional<Rect> resolve_range(const Expr& e, const std::string& sheet);

    const Workbook& wb_;
    std::map<CellAddress, Value> memo_;
    std::set<CellAddress> in_progress_;
};

// Single-shot helpers; each call is a fresh pass.
Value evaluate_cell(const Workbook& wb, const CellAddress& addr);
Value evaluate_expr(const Workbook& wb, const Expr& e);
Value evaluate_expr(const Workbook& wb, const ExprPtr& e);

// Equality used by "=", "<>" and lookup matching: numbers by value, text
// case-insensitively, Empty equal to "" and to 0; mismatched types are
// simply unequal. Never errors; callers handle error operands first.
bool loose_equal(const Value& a, const Value& b);

} // namespace unnest
