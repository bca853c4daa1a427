#pragma once

#include "unnest/ast.hpp"
#include "unnest/workbook.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace unnest {

struct NotAnIf : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ComplexChain : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotNormalized : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shape of a nested-IF chain. Only IFs sitting directly in a value
// position extend the chain; an IF buried in a test or inside a larger
// outcome expression is opaque. A single IF counts as BranchOnFalse.
enum class BranchShape {
    BranchOnFalse, // every level nests in value_if_false
    BranchOnTrue,  // every level nests in value_if_true
    Mixed,         // both kinds of level, but never both at once
    Complex,       // some level has IFs in both value positions
};

std::string shape_name(BranchShape shape);

// Linearized branch-on-false chain: tests outermost-first, outcomes
// aligned with them plus the final otherwise value.
struct IfChain {
    std::vector<ExprPtr> tests;
    std::vector<ExprPtr> outcomes; // tests.size() + 1 entries
    BranchShape shape = BranchShape::BranchOnFalse;
    CellAddress source;
    int if_count = 0;
    int depth = 0;
};

// Walks the chain of an IF-rooted expression. Throws NotAnIf otherwise.
BranchShape classify(const Expr& e);
BranchShape classify(const ExprPtr& e);

// Flips a comparison root (= <-> <>, < <-> >=, > <-> <=), unwraps NOT,
// and wraps anything else in NOT. An involution on comparison roots.
ExprPtr invert_test(const ExprPtr& e);

// Rewrites every branch-on-true level IF(t, nested, v) into
// IF(invert(t), v, nested). Throws ComplexChain on complex input.
ExprPtr normalize_to_branch_on_false(const ExprPtr& e);

// Splits a branch-on-false chain into tests and outcomes.
// Throws NotNormalized when a branch-on-true or complex level remains.
IfChain extract_chain(const ExprPtr& e, const CellAddress& source);

struct NestedIfHit {
    CellAddress cell;
    int if_count = 0;
    int depth = 0;
    BranchShape shape = BranchShape::BranchOnFalse;
};

// Every formula cell containing at least min_if_count IF calls, in
// (sheet, row, column) order. Formulas whose root is not an IF are
// reported as Complex: the lookup technique cannot touch them either.
std::vector<NestedIfHit> find_nested_ifs(const Workbook& wb, int min_if_count);

// Span of the first IF node with IFs in both value positions, if any;
// used for Complex diagnostics.
std::optional<Span> find_complex_node(const Expr& e);

} // namespace unnest
