#include "unnest/analyzer.hpp"

#include "unnest/printer.hpp"

namespace unnest {

namespace {

const FuncCall& if_call_of(const Expr& e) {
    const FuncCall* f = as_func(e, "IF");
    if (!f)
        throw NotAnIf("expression root is not an IF call");
    return *f;
}

// value_if_false of a two-argument IF is an implicit FALSE.
ExprPtr if_false_arg(const FuncCall& f) {
    return f.args.size() >= 3 ? f.args[2] : make_bool(false);
}

bool value_is_if(const ExprPtr& e) {
    return e && is_if_call(*e);
}

} // namespace

std::string shape_name(BranchShape shape) {
    switch (shape) {
    case BranchShape::BranchOnFalse:
        return "BranchOnFalse";
    case BranchShape::BranchOnTrue:
        return "BranchOnTrue";
    case BranchShape::Mixed:
        return "Mixed";
    case BranchShape::Complex:
        return "Complex";
    }
    return "?";
}

BranchShape classify(const Expr& e) {
    const FuncCall* f = &if_call_of(e);
    bool saw_true_level = false;
    bool saw_false_level = false;
    while (true) {
        if (f->args.size() < 2)
            break;
        ExprPtr vt = f->args[1];
        ExprPtr vf = if_false_arg(*f);
        bool t = value_is_if(vt);
        bool fl = value_is_if(vf);
        if (t && fl)
            return BranchShape::Complex;
        if (t) {
            saw_true_level = true;
            f = as_func(*vt, "IF");
        } else if (fl) {
            saw_false_level = true;
            f = as_func(*vf, "IF");
        } else {
            break;
        }
    }
    if (saw_true_level && saw_false_level)
        return BranchShape::Mixed;
    if (saw_true_level)
        return BranchShape::BranchOnTrue;
    return BranchShape::BranchOnFalse; // includes the single-IF chain
}

BranchShape classify(const ExprPtr& e) {
    return classify(*e);
}

ExprPtr invert_test(const ExprPtr& e) {
    ExprPtr body = strip_parens(e);
    if (const auto* b = std::get_if<BinaryOp>(&body->node)) {
        auto flipped = [&](BinaryOpKind op) { return make_binary(op, b->left, b->right); };
        switch (b->op) {
        case BinaryOpKind::Eq:
            return flipped(BinaryOpKind::Ne);
        case BinaryOpKind::Ne:
            return flipped(BinaryOpKind::Eq);
        case BinaryOpKind::Lt:
            return flipped(BinaryOpKind::Ge);
        case BinaryOpKind::Ge:
            return flipped(BinaryOpKind::Lt);
        case BinaryOpKind::Gt:
            return flipped(BinaryOpKind::Le);
        case BinaryOpKind::Le:
            return flipped(BinaryOpKind::Gt);
        default:
            break;
        }
    }
    if (const FuncCall* f = as_func(*body, "NOT"); f && f->args.size() == 1)
        return f->args[0];
    return make_call("NOT", {body});
}

ExprPtr normalize_to_branch_on_false(const ExprPtr& e) {
    const FuncCall& f = if_call_of(*e);
    ExprPtr test = f.args.empty() ? make_bool(false) : f.args[0];
    ExprPtr vt = f.args.size() > 1 ? f.args[1] : make_bool(true);
    ExprPtr vf = if_false_arg(f);
    bool t = value_is_if(vt);
    bool fl = value_is_if(vf);
    if (t && fl)
        throw ComplexChain("IF has nested IFs in both value positions");
    if (t)
        return make_call("IF", {invert_test(test), vf, normalize_to_branch_on_false(vt)});
    if (fl)
        return make_call("IF", {test, vt, normalize_to_branch_on_false(vf)});
    return e;
}

IfChain extract_chain(const ExprPtr& e, const CellAddress& source) {
    IfChain chain;
    chain.source = source;
    chain.if_count = count_ifs(*e);
    chain.depth = nesting_depth(*e);
    chain.shape = BranchShape::BranchOnFalse;

    const FuncCall* f = &if_call_of(*e);
    while (true) {
        if (f->args.empty())
            throw NotNormalized("IF call with no arguments");
        ExprPtr vt = f->args.size() > 1 ? f->args[1] : make_bool(true);
        ExprPtr vf = if_false_arg(*f);
        if (value_is_if(vt))
            throw NotNormalized("branch-on-true level; normalize first");
        chain.tests.push_back(f->args[0]);
        chain.outcomes.push_back(vt);
        if (value_is_if(vf)) {
            f = as_func(*vf, "IF");
        } else {
            chain.outcomes.push_back(vf);
            break;
        }
    }
    return chain;
}

std::vector<NestedIfHit> find_nested_ifs(const Workbook& wb, int min_if_count) {
    std::vector<NestedIfHit> hits;
    for (const auto& [addr, cell] : wb.cells()) {
        const FormulaCell* f = cell.formula();
        if (!f)
            continue;
        int n = count_ifs(*f->ast);
        if (n < min_if_count)
            continue;
        NestedIfHit hit;
        hit.cell = addr;
        hit.if_count = n;
        hit.depth = nesting_depth(*f->ast);
        hit.shape = is_if_call(*f->ast) ? classify(*f->ast) : BranchShape::Complex;
        hits.push_back(hit);
    }
    return hits; // map iteration is already (sheet, row, column) order
}

std::optional<Span> find_complex_node(const Expr& e) {
    const Expr& s = strip_parens(e);
    if (const auto* f = std::get_if<FuncCall>(&s.node)) {
        if (f->name == "IF" && f->args.size() >= 3 && value_is_if(f->args[1]) &&
            value_is_if(f->args[2]))
            return s.span;
        for (const auto& a : f->args)
            if (auto found = find_complex_node(*a))
                return found;
    } else if (const auto* b = std::get_if<BinaryOp>(&s.node)) {
        if (auto found = find_complex_node(*b->left))
            return found;
        return find_complex_node(*b->right);
    } else if (const auto* u = std::get_if<UnaryOp>(&s.node)) {
        return find_complex_node(*u->operand);
    }
    return std::nullopt;
}

} // namespace unnest
