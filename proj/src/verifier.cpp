#include "unnest/verifier.hpp"

#include "unnest/evaluator.hpp"
#include "unnest/printer.hpp"

#include <algorithm>

namespace unnest {

namespace {

std::string mask_context(const std::vector<bool>& values) {
    std::string s = "(";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i)
            s += ",";
        s += values[i] ? "T" : "F";
    }
    s += ")";
    return s;
}

// Outcome sentinels start here; any plan outcome that matches no chain
// outcome gets a distinct off-scale sentinel so it still diverges.
constexpr double kSentinelBase = 1000.0;
constexpr double kUnmatchedBase = 900000.0;

ExprPtr chain_as_nested_if(const std::vector<bool>& tests, int n) {
    // Built innermost-first: IF(tN, sN, otherwise) upward.
    ExprPtr acc = make_number(kSentinelBase + n); // otherwise sentinel
    for (int i = n - 1; i >= 0; --i)
        acc = make_call("IF", {make_bool(tests[i]), make_number(kSentinelBase + i), acc});
    return acc;
}

// Unwraps a WrapIfError guard so sentinel matching sees the outcome.
ExprPtr unwrap_guard(const ExprPtr& e) {
    if (const FuncCall* f = as_func(*e, "IFERROR"); f && f->args.size() == 2)
        return f->args[0];
    return e;
}

} // namespace

std::string divergence_kind_name(DivergenceKind kind) {
    switch (kind) {
    case DivergenceKind::ValueMismatch:
        return "ValueMismatch";
    case DivergenceKind::ErrorLatency:
        return "ErrorLatency";
    case DivergenceKind::TestErrorSkip:
        return "TestErrorSkip";
    }
    return "?";
}

std::string status_name(EquivalenceStatus status) {
    switch (status) {
    case EquivalenceStatus::Equivalent:
        return "Equivalent";
    case EquivalenceStatus::Divergent:
        return "Divergent";
    case EquivalenceStatus::Inconclusive:
        return "Inconclusive";
    }
    return "?";
}

ExprPtr stub_tests(const ExprPtr& e, const std::vector<ExprPtr>& tests,
                   const std::vector<bool>& values) {
    for (std::size_t i = 0; i < tests.size(); ++i) {
        if (ast_equal(e, tests[i]))
            return make_bool(values[i]);
        if (ast_equal(e, invert_test(tests[i])))
            return make_bool(!values[i]);
    }
    const Expr& body = *e;
    if (const auto* f = std::get_if<FuncCall>(&body.node)) {
        std::vector<ExprPtr> args;
        args.reserve(f->args.size());
        for (const auto& a : f->args)
            args.push_back(stub_tests(a, tests, values));
        return make_call(f->name, std::move(args));
    }
    if (const auto* b = std::get_if<BinaryOp>(&body.node))
        return make_binary(b->op, stub_tests(b->left, tests, values),
                           stub_tests(b->right, tests, values));
    if (const auto* u = std::get_if<UnaryOp>(&body.node))
        return make_unary(u->op, stub_tests(u->operand, tests, values));
    if (const auto* p = std::get_if<Paren>(&body.node))
        return stub_tests(p->inner, tests, values);
    return e;
}

bool equivalent_over_tests(const ExprPtr& a, const ExprPtr& b,
                           const std::vector<ExprPtr>& tests) {
    const std::size_t n = tests.size();
    Workbook scratch;
    for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
        std::vector<bool> values(n);
        for (std::size_t i = 0; i < n; ++i)
            values[i] = (mask >> (n - 1 - i)) & 1; // lexicographic, F before T
        Value va = evaluate_expr(scratch, stub_tests(a, tests, values));
        Value vb = evaluate_expr(scratch, stub_tests(b, tests, values));
        if (!(va == vb))
            return false;
    }
    return true;
}

EquivalenceReport structural_equivalence(const IfChain& chain, const TransformPlan& plan,
                                         int limit) {
    EquivalenceReport report;
    const int n = static_cast<int>(chain.tests.size());
    if (n > limit) {
        report.status = EquivalenceStatus::Inconclusive;
        report.note = "chain has " + std::to_string(n) + " tests, over the exhaustive limit of " +
                      std::to_string(limit);
        return report;
    }

    // Sentinel for each plan outcome cell, keyed by which chain outcome
    // its formula matches; unmatched formulas get off-scale sentinels.
    std::vector<double> outcome_sentinels;
    for (std::size_t i = 0; i < plan.outcome_cells.size(); ++i) {
        ExprPtr body = unwrap_guard(plan.outcome_cells[i].second);
        double sentinel = kUnmatchedBase + static_cast<double>(i);
        for (std::size_t j = 0; j < chain.outcomes.size(); ++j) {
            if (ast_equal(body, chain.outcomes[j])) {
                sentinel = kSentinelBase + static_cast<double>(j);
                break;
            }
        }
        outcome_sentinels.push_back(sentinel);
    }

    // How each plan test cell responds to an assignment: the index of the
    // chain test it matches (negated or not), or no match at all.
    struct TestBinding {
        int chain_index = -1;
        bool negated = false;
    };
    std::vector<TestBinding> bindings;
    for (const auto& [addr, expr] : plan.test_cells) {
        TestBinding b;
        for (int j = 0; j < n; ++j) {
            if (ast_equal(expr, chain.tests[j])) {
                b.chain_index = j;
                break;
            }
            if (ast_equal(expr, invert_test(chain.tests[j]))) {
                b.chain_index = j;
                b.negated = true;
                break;
            }
        }
        bindings.push_back(b);
    }

    Workbook base;
    for (std::size_t i = 0; i < plan.outcome_cells.size(); ++i)
        base.set_literal(plan.outcome_cells[i].first, Value::number(outcome_sentinels[i]));
    if (plan.otherwise_test_cell)
        base.set_literal(plan.otherwise_test_cell->first, Value::boolean(true));

    const std::uint64_t total = 1ULL << n;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        std::vector<bool> values(n);
        for (int i = 0; i < n; ++i)
            values[i] = (mask >> (n - 1 - i)) & 1;

        Workbook wb = base;
        for (std::size_t i = 0; i < plan.test_cells.size(); ++i) {
            const TestBinding& b = bindings[i];
            if (b.chain_index < 0) {
                // Unrecognized test formula: an error stub never matches
                // the lookup, which surfaces the fault as a divergence.
                wb.set_literal(plan.test_cells[i].first, Value::error(ErrorKind::Value));
            } else {
                bool v = values[b.chain_index];
                wb.set_literal(plan.test_cells[i].first, Value::boolean(b.negated ? !v : v));
            }
        }

        Value original = evaluate_expr(wb, chain_as_nested_if(values, n));
        Evaluator ev(wb);
        Value transformed = ev.expr(plan.result_formula, plan.source.sheet);
        ++report.assignments_checked;
        if (!(original == transformed))
            report.divergences.push_back({mask_context(values), original, transformed,
                                          DivergenceKind::ValueMismatch});
    }
    report.status = report.divergences.empty() ? EquivalenceStatus::Equivalent
                                               : EquivalenceStatus::Divergent;
    return report;
}

std::optional<TransformPlan> infer_lookup_plan(const Workbook& transformed,
                                               const CellAddress& result_cell) {
    const Cell* cell = transformed.find_cell(result_cell);
    if (!cell || !cell->is_formula())
        return std::nullopt;
    const Expr& root = strip_parens(*cell->formula()->ast);
    const FuncCall* f = std::get_if<FuncCall>(&root.node);
    if (!f || (f->name != "VLOOKUP" && f->name != "HLOOKUP") || f->args.size() != 4)
        return std::nullopt;
    const auto* range = std::get_if<RangeRef>(&strip_parens(*f->args[1]).node);
    if (!range)
        return std::nullopt;
    const auto* index_lit = std::get_if<NumberLit>(&strip_parens(*f->args[2]).node);
    const int index = index_lit ? static_cast<int>(index_lit->value) : 2;
    if (index < 2)
        return std::nullopt;

    const bool vertical = f->name == "VLOOKUP";
    std::string sheet = range->start.sheet.empty() ? result_cell.sheet : range->start.sheet;
    int col1 = std::min(range->start.column, range->end.column);
    int col2 = std::max(range->start.column, range->end.column);
    int row1 = std::min(range->start.row, range->end.row);
    int row2 = std::max(range->start.row, range->end.row);

    TransformPlan plan;
    plan.mode = TransformMode::Lookup;
    plan.source = result_cell;
    plan.orientation = vertical ? Orientation::Vertical : Orientation::Horizontal;
    plan.table_range = *range;
    plan.result_formula = cell->formula()->ast;

    const int rows = vertical ? row2 - row1 + 1 : col2 - col1 + 1;
    for (int i = 0; i < rows; ++i) {
        CellAddress test_addr = vertical ? CellAddress{sheet, col1, row1 + i}
                                         : CellAddress{sheet, col1 + i, row1};
        CellAddress out_addr = vertical ? CellAddress{sheet, col1 + index - 1, row1 + i}
                                        : CellAddress{sheet, col1 + i, row1 + index - 1};
        const Cell* test = transformed.find_cell(test_addr);
        const Cell* out = transformed.find_cell(out_addr);
        const bool is_otherwise = i == rows - 1 && test && !test->is_formula() &&
                                  test->literal()->is_boolean() &&
                                  test->literal()->as_boolean();
        if (is_otherwise)
            plan.otherwise_test_cell = {test_addr, make_bool(true)};
        else
            plan.test_cells.emplace_back(test_addr,
                                         test && test->is_formula() ? test->formula()->ast
                                                                    : nullptr);
        plan.outcome_cells.emplace_back(out_addr, out && out->is_formula()
                                                      ? out->formula()->ast
                                                      : nullptr);
    }
    return plan;
}

EquivalenceReport state_equivalence(const Workbook& original, const Workbook& transformed,
                                    const CellAddress& result_cell, const DriverSweep& drivers) {
    if (drivers.empty())
        throw EmptyDrivers("no driver values supplied");
    for (const auto& [addr, values] : drivers)
        if (values.empty())
            throw EmptyDrivers("driver " + format_address(addr) + " has no values");

    auto inferred = infer_lookup_plan(transformed, result_cell);

    EquivalenceReport report;
    std::vector<std::size_t> idx(drivers.size(), 0);
    while (true) {
        DriverState state;
        std::string context;
        for (std::size_t d = 0; d < drivers.size(); ++d) {
            const Value& v = drivers[d].second[idx[d]];
            state.emplace_back(drivers[d].first, v);
            if (d)
                context += ", ";
            context += format_address(drivers[d].first) + "=" + v.display();
        }

        Workbook wb_orig = original;
        Workbook wb_trans = transformed;
        for (const auto& [addr, v] : state) {
            wb_orig.set_literal(addr, v);
            wb_trans.set_literal(addr, v);
        }
        Evaluator ev_orig(wb_orig);
        Evaluator ev_trans(wb_trans);
        Value vo = ev_orig.cell(result_cell);
        Value vt = ev_trans.cell(result_cell);
        ++report.assignments_checked;

        if (!(vo == vt)) {
            DivergenceKind kind = DivergenceKind::ValueMismatch;
            if (vo.is_error() != vt.is_error())
                kind = DivergenceKind::ErrorLatency;
            if (vo.is_error() && inferred) {
                // If a test cell carries the same error the original
                // reports, the lookup silently skipped that row.
                for (const auto& [addr, _] : inferred->test_cells) {
                    Value tv = ev_trans.cell(addr);
                    if (tv.is_error() && tv.as_error() == vo.as_error()) {
                        kind = DivergenceKind::TestErrorSkip;
                        break;
                    }
                }
            }
            report.divergences.push_back({context, vo, vt, kind});
        }

        if (inferred && !vt.is_error()) {
            auto probe = [&](const CellAddress& addr) {
                Value v = ev_trans.cell(addr);
                if (v.is_error())
                    report.latent_errors.push_back(
                        {report.assignments_checked - 1, addr, v.as_error()});
            };
            for (const auto& [addr, _] : inferred->test_cells)
                probe(addr);
            for (const auto& [addr, _] : inferred->outcome_cells)
                probe(addr);
        }

        // Odometer over the driver lists, last driver fastest.
        std::size_t d = drivers.size();
        while (d > 0) {
            --d;
            if (++idx[d] < drivers[d].second.size())
                break;
            idx[d] = 0;
            if (d == 0)
                goto done;
        }
    }
done:
    report.status = report.divergences.empty() ? EquivalenceStatus::Equivalent
                                               : EquivalenceStatus::Divergent;
    return report;
}

} // namespace unnest
