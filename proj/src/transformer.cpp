#include "unnest/transformer.hpp"

#include "unnest/evaluator.hpp"
#include "unnest/printer.hpp"

#include <algorithm>

namespace unnest {

namespace {

// Rightmost column referenced by the expression on the source sheet.
int rightmost_referenced_column(const Expr& e) {
    struct V {
        int best = 0;
        void walk(const Expr& x) {
            if (const auto* r = std::get_if<CellRef>(&x.node)) {
                best = std::max(best, r->column);
            } else if (const auto* rr = std::get_if<RangeRef>(&x.node)) {
                best = std::max({best, rr->start.column, rr->end.column});
            } else if (const auto* f = std::get_if<FuncCall>(&x.node)) {
                for (const auto& a : f->args)
                    walk(*a);
            } else if (const auto* b = std::get_if<BinaryOp>(&x.node)) {
                walk(*b->left);
                walk(*b->right);
            } else if (const auto* u = std::get_if<UnaryOp>(&x.node)) {
                walk(*u->operand);
            } else if (const auto* p = std::get_if<Paren>(&x.node)) {
                walk(*p->inner);
            }
        }
    } v;
    v.walk(e);
    return v.best;
}

CellAddress default_anchor(const Workbook&, const CellAddress& source, const Expr& formula) {
    int right = rightmost_referenced_column(formula);
    if (right == 0)
        right = source.column;
    return {source.sheet, right + 2, source.row};
}

const FormulaCell& formula_at(const Workbook& wb, const CellAddress& source) {
    const Cell* cell = wb.find_cell(source);
    if (!cell || !cell->is_formula())
        throw NotAFormula(format_address(source) + " does not hold a formula");
    return *cell->formula();
}

CellRef plain_ref(const CellAddress& addr, const std::string& context_sheet) {
    CellRef ref;
    if (addr.sheet != context_sheet)
        ref.sheet = addr.sheet;
    ref.column = addr.column;
    ref.row = addr.row;
    return ref;
}

void check_bounds(const CellAddress& addr, std::vector<CellAddress>& blocked) {
    if (addr.column < 1 || addr.column > kMaxColumn || addr.row < 1 || addr.row > kMaxRow)
        blocked.push_back(addr);
}

void check_placement(const Workbook& wb, const TransformPlan& plan) {
    std::vector<CellAddress> blocked;
    std::vector<CellAddress> outside;
    auto probe = [&](const CellAddress& addr) {
        check_bounds(addr, outside);
        if (!wb.cell_empty(addr))
            blocked.push_back(addr);
    };
    for (const auto& [addr, _] : plan.test_cells)
        probe(addr);
    for (const auto& [addr, _] : plan.outcome_cells)
        probe(addr);
    if (plan.otherwise_test_cell)
        probe(plan.otherwise_test_cell->first);
    for (const auto& [addr, _] : plan.label_cells)
        probe(addr);
    if (!outside.empty())
        throw PlacementCollision("placement runs outside the grid near " +
                                     format_address(outside.front()),
                                 outside);
    if (!blocked.empty()) {
        std::string msg = "placement collides with non-empty cells:";
        for (const auto& b : blocked)
            msg += " " + format_address(b);
        throw PlacementCollision(msg, blocked);
    }
}

ExprPtr guarded_outcome(const ExprPtr& outcome, const GuardPolicy& guard) {
    if (guard.mode != GuardMode::WrapIfError)
        return outcome;
    const Expr& body = strip_parens(*outcome);
    // Literal outcomes cannot error; leave them unwrapped.
    if (std::get_if<NumberLit>(&body.node) || std::get_if<TextLit>(&body.node) ||
        std::get_if<BoolLit>(&body.node))
        return outcome;
    return make_call("IFERROR", {outcome, make_text(guard.flag_text)});
}

void add_names(TransformPlan& plan) {
    for (std::size_t i = 0; i < plan.test_cells.size(); ++i)
        plan.names.emplace_back("Test" + std::to_string(i + 1), plan.test_cells[i].first);
    for (std::size_t i = 0; i < plan.outcome_cells.size(); ++i)
        plan.names.emplace_back("Value" + std::to_string(i + 1), plan.outcome_cells[i].first);
}

} // namespace

TransformPlan plan_lookup_transform(const Workbook& wb, const CellAddress& source,
                                    const PlacementSpec& placement, const GuardPolicy& guard) {
    const FormulaCell& cell = formula_at(wb, source);
    if (classify(*cell.ast) == BranchShape::Complex)
        throw ComplexChain("complex branching at " + format_address(source) +
                           ": lookup technique not applicable");

    ExprPtr normalized = normalize_to_branch_on_false(cell.ast);
    IfChain chain = extract_chain(normalized, source);
    const int n = static_cast<int>(chain.tests.size());

    TransformPlan plan;
    plan.mode = TransformMode::Lookup;
    plan.source = source;
    plan.orientation = placement.orientation;
    plan.guard = guard;

    CellAddress anchor = placement.anchor.value_or(default_anchor(wb, source, *cell.ast));
    const bool vertical = placement.orientation == Orientation::Vertical;

    auto table_at = [&](int major, int minor) -> CellAddress {
        // major runs along the table rows (vertical) or columns
        // (horizontal); minor 0 is the test strip, 1 the outcome strip.
        if (vertical)
            return {anchor.sheet, anchor.column + minor, anchor.row + major};
        return {anchor.sheet, anchor.column + major, anchor.row + minor};
    };

    for (int i = 0; i < n; ++i)
        plan.test_cells.emplace_back(table_at(i, 0), chain.tests[i]);
    plan.otherwise_test_cell = {table_at(n, 0), make_bool(true)};
    for (int i = 0; i <= n; ++i)
        plan.outcome_cells.emplace_back(table_at(i, 1), guarded_outcome(chain.outcomes[i], guard));

    RangeRef table;
    table.start = plain_ref(anchor, source.sheet);
    table.end = plain_ref(table_at(n, 1), source.sheet);
    plan.table_range = table;

    plan.result_formula = make_call(vertical ? "VLOOKUP" : "HLOOKUP",
                                    {make_bool(true), make_range(table), make_number(2),
                                     make_bool(false)});
    plan.chain = std::move(chain);

    if (placement.label_column) {
        // Name labels sit before the test strip, Value names after the
        // outcome strip, mirroring the paper's table layout.
        for (int i = 0; i <= n; ++i) {
            CellAddress name_cell = vertical
                                        ? CellAddress{anchor.sheet, anchor.column - 1,
                                                      anchor.row + i}
                                        : CellAddress{anchor.sheet, anchor.column + i,
                                                      anchor.row - 1};
            CellAddress value_cell = vertical
                                         ? CellAddress{anchor.sheet, anchor.column + 2,
                                                       anchor.row + i}
                                         : CellAddress{anchor.sheet, anchor.column + i,
                                                       anchor.row + 2};
            plan.label_cells.emplace_back(name_cell, i < n ? "Test" + std::to_string(i + 1)
                                                           : "(otherwise)");
            plan.label_cells.emplace_back(value_cell, "Value" + std::to_string(i + 1));
        }
    }
    if (placement.use_names)
        add_names(plan);

    check_placement(wb, plan);
    return plan;
}

namespace {

// Visibility extraction: tests and leaf outcomes of the whole IF tree in
// pre-order; the rewritten tree references the new cells (or names).
struct VisibilityRewrite {
    std::vector<ExprPtr> tests;
    std::vector<ExprPtr> outcomes;

    ExprPtr rewrite(const ExprPtr& node, bool as_outcome,
                    const std::vector<ExprPtr>& test_refs,
                    const std::vector<ExprPtr>& outcome_refs);

    // First pass: collect counts so reference cells can be laid out.
    void collect(const ExprPtr& node) {
        const FuncCall* f = as_func(*node, "IF");
        if (!f || f->args.size() < 2) {
            outcomes.push_back(node);
            return;
        }
        tests.push_back(f->args[0]);
        collect(f->args[1]);
        collect(f->args.size() >= 3 ? f->args[2] : make_bool(false));
    }
};

ExprPtr rewrite_with_refs(const ExprPtr& node, std::size_t& test_i, std::size_t& outcome_i,
                          const std::vector<ExprPtr>& test_refs,
                          const std::vector<ExprPtr>& outcome_refs) {
    const FuncCall* f = as_func(*node, "IF");
    if (!f || f->args.size() < 2)
        return outcome_refs[outcome_i++];
    ExprPtr test = test_refs[test_i++];
    ExprPtr vt = rewrite_with_refs(f->args[1], test_i, outcome_i, test_refs, outcome_refs);
    ExprPtr vf = rewrite_with_refs(f->args.size() >= 3 ? f->args[2] : make_bool(false), test_i,
                                   outcome_i, test_refs, outcome_refs);
    return make_call("IF", {test, vt, vf});
}

} // namespace

TransformPlan plan_visibility_transform(const Workbook& wb, const CellAddress& source,
                                        const PlacementSpec& placement) {
    const FormulaCell& cell = formula_at(wb, source);
    if (!is_if_call(*cell.ast))
        throw NotAnIf(format_address(source) + " is not an IF formula");

    VisibilityRewrite vis;
    vis.collect(cell.ast);
    const int n = static_cast<int>(vis.tests.size());

    TransformPlan plan;
    plan.mode = TransformMode::Visibility;
    plan.source = source;
    plan.orientation = placement.orientation;
    plan.chain.source = source;
    plan.chain.tests = vis.tests;
    plan.chain.outcomes = vis.outcomes;
    plan.chain.shape = classify(*cell.ast);
    plan.chain.if_count = count_ifs(*cell.ast);
    plan.chain.depth = nesting_depth(*cell.ast);

    CellAddress anchor = placement.anchor.value_or(default_anchor(wb, source, *cell.ast));
    const bool vertical = placement.orientation == Orientation::Vertical;
    auto strip_at = [&](int major, int minor) -> CellAddress {
        if (vertical)
            return {anchor.sheet, anchor.column + minor, anchor.row + major};
        return {anchor.sheet, anchor.column + major, anchor.row + minor};
    };

    for (int i = 0; i < n; ++i)
        plan.test_cells.emplace_back(strip_at(i, 0), vis.tests[i]);
    for (int i = 0; i < static_cast<int>(vis.outcomes.size()); ++i)
        plan.outcome_cells.emplace_back(strip_at(i, 1), vis.outcomes[i]);

    std::vector<ExprPtr> test_refs, outcome_refs;
    for (int i = 0; i < n; ++i)
        test_refs.push_back(placement.use_names
                                ? make_name("Test" + std::to_string(i + 1))
                                : make_cellref(plain_ref(plan.test_cells[i].first, source.sheet)));
    for (std::size_t i = 0; i < plan.outcome_cells.size(); ++i)
        outcome_refs.push_back(
            placement.use_names
                ? make_name("Value" + std::to_string(i + 1))
                : make_cellref(plain_ref(plan.outcome_cells[i].first, source.sheet)));

    std::size_t ti = 0, oi = 0;
    plan.result_formula = rewrite_with_refs(cell.ast, ti, oi, test_refs, outcome_refs);

    if (placement.label_column) {
        for (int i = 0; i < static_cast<int>(plan.outcome_cells.size()); ++i) {
            CellAddress name_cell = vertical ? CellAddress{anchor.sheet, anchor.column - 1,
                                                           anchor.row + i}
                                             : CellAddress{anchor.sheet, anchor.column + i,
                                                           anchor.row - 1};
            CellAddress value_cell = vertical ? CellAddress{anchor.sheet, anchor.column + 2,
                                                            anchor.row + i}
                                              : CellAddress{anchor.sheet, anchor.column + i,
                                                            anchor.row + 2};
            if (i < n)
                plan.label_cells.emplace_back(name_cell, "Test" + std::to_string(i + 1));
            plan.label_cells.emplace_back(value_cell, "Value" + std::to_string(i + 1));
        }
    }
    if (placement.use_names)
        add_names(plan);

    check_placement(wb, plan);
    return plan;
}

Workbook apply_plan(const Workbook& wb, const TransformPlan& plan) {
    check_placement(wb, plan);
    Workbook out = wb;
    for (const auto& [addr, expr] : plan.test_cells)
        out.set_formula(addr, expr);
    for (const auto& [addr, expr] : plan.outcome_cells)
        out.set_formula(addr, expr);
    if (plan.otherwise_test_cell)
        out.set_literal(plan.otherwise_test_cell->first, Value::boolean(true));
    for (const auto& [addr, text] : plan.label_cells)
        out.set_literal(addr, Value::text(text));
    for (const auto& [name, addr] : plan.names)
        out.define_name(name, NameTarget{addr, addr, false});
    out.set_formula(plan.source, plan.result_formula);
    return out;
}

std::vector<LatentError> detect_latent_errors(const Workbook& transformed,
                                              const TransformPlan& plan,
                                              const std::vector<DriverState>& states) {
    std::vector<LatentError> found;
    for (std::size_t si = 0; si < states.size(); ++si) {
        Workbook wb = transformed;
        for (const auto& [addr, v] : states[si])
            wb.set_literal(addr, v);
        Evaluator ev(wb);
        Value result = ev.cell(plan.source);
        if (result.is_error())
            continue; // the error is visible in the result, not latent
        auto probe = [&](const CellAddress& addr) {
            Value v = ev.cell(addr);
            if (v.is_error())
                found.push_back({si, addr, v.as_error()});
        };
        for (const auto& [addr, _] : plan.test_cells)
            probe(addr);
        for (const auto& [addr, _] : plan.outcome_cells)
            probe(addr);
    }
    return found;
}

} // namespace unnest
