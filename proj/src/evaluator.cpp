#include "unnest/evaluator.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace unnest {

namespace {

std::string fold_case(const std::string& s) {
    std::string out = s;
    for (char& c : out)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool is_comparison(BinaryOpKind op) {
    switch (op) {
    case BinaryOpKind::Eq:
    case BinaryOpKind::Ne:
    case BinaryOpKind::Lt:
    case BinaryOpKind::Le:
    case BinaryOpKind::Gt:
    case BinaryOpKind::Ge:
        return true;
    default:
        return false;
    }
}

Value from_ordering(BinaryOpKind op, int cmp) {
    switch (op) {
    case BinaryOpKind::Lt:
        return Value::boolean(cmp < 0);
    case BinaryOpKind::Le:
        return Value::boolean(cmp <= 0);
    case BinaryOpKind::Gt:
        return Value::boolean(cmp > 0);
    case BinaryOpKind::Ge:
        return Value::boolean(cmp >= 0);
    default:
        return Value::error(ErrorKind::Value);
    }
}

std::string concat_text(const Value& v) {
    if (v.is_empty())
        return "";
    return v.display();
}

} // namespace

bool loose_equal(const Value& a, const Value& b) {
    if (a.is_error() || b.is_error())
        return false;
    if (a.is_number()) {
        if (b.is_number())
            return a.as_number() == b.as_number();
        if (b.is_empty())
            return a.as_number() == 0.0;
        return false;
    }
    if (a.is_text()) {
        if (b.is_text())
            return fold_case(a.as_text()) == fold_case(b.as_text());
        if (b.is_empty())
            return a.as_text().empty();
        return false;
    }
    if (a.is_boolean())
        return b.is_boolean() && a.as_boolean() == b.as_boolean();
    // a empty
    if (b.is_empty())
        return true;
    if (b.is_number())
        return b.as_number() == 0.0;
    if (b.is_text())
        return b.as_text().empty();
    return false; // empty vs boolean: unequal
}

Value Evaluator::compare(BinaryOpKind op, const Value& a, const Value& b) {
    if (a.is_error())
        return a;
    if (b.is_error())
        return b;

    // Mixing a boolean with any other type is rejected loudly instead of
    // adopting Excel's cross-type ordering.
    if (a.is_boolean() != b.is_boolean())
        return Value::error(ErrorKind::Value);

    if (op == BinaryOpKind::Eq)
        return Value::boolean(loose_equal(a, b));
    if (op == BinaryOpKind::Ne)
        return Value::boolean(!loose_equal(a, b));

    // Ordering. Boolean operands and mixed number/text orderings are
    // rejected loudly rather than silently following Excel's type order.
    auto num_of = [](const Value& v, double& out) {
        if (v.is_number()) {
            out = v.as_number();
            return true;
        }
        if (v.is_empty()) {
            out = 0;
            return true;
        }
        return false;
    };
    double x = 0, y = 0;
    if (num_of(a, x) && num_of(b, y))
        return from_ordering(op, x < y ? -1 : (x > y ? 1 : 0));
    if ((a.is_text() || a.is_empty()) && (b.is_text() || b.is_empty())) {
        std::string s = a.is_text() ? fold_case(a.as_text()) : "";
        std::string t = b.is_text() ? fold_case(b.as_text()) : "";
        return from_ordering(op, s < t ? -1 : (s > t ? 1 : 0));
    }
    return Value::error(ErrorKind::Value);
}

Value Evaluator::arithmetic(BinaryOpKind op, const Value& a, const Value& b) {
    if (a.is_error())
        return a;
    if (b.is_error())
        return b;
    auto coerce = [](const Value& v, double& out) -> bool {
        if (v.is_number()) {
            out = v.as_number();
            return true;
        }
        if (v.is_empty()) {
            out = 0;
            return true;
        }
        if (v.is_boolean()) {
            out = v.as_boolean() ? 1 : 0;
            return true;
        }
        return false; // text does not coerce
    };
    double x = 0, y = 0;
    if (!coerce(a, x) || !coerce(b, y))
        return Value::error(ErrorKind::Value);
    switch (op) {
    case BinaryOpKind::Add:
        return Value::number(x + y);
    case BinaryOpKind::Sub:
        return Value::number(x - y);
    case BinaryOpKind::Mul:
        return Value::number(x * y);
    case BinaryOpKind::Div:
        if (y == 0)
            return Value::error(ErrorKind::Div0);
        return Value::number(x / y);
    case BinaryOpKind::Pow: {
        if (x == 0 && y < 0)
            return Value::error(ErrorKind::Div0);
        double r = std::pow(x, y);
        if (!std::isfinite(r))
            return Value::error(ErrorKind::Value);
        return Value::number(r);
    }
    default:
        return Value::error(ErrorKind::Value);
    }
}

Value Evaluator::to_condition(const Value& v) {
    if (v.is_error())
        return v;
    if (v.is_boolean())
        return v;
    if (v.is_number())
        return Value::boolean(v.as_number() != 0);
    if (v.is_empty())
        return Value::boolean(false);
    return Value::error(ErrorKind::Value); // text is not a condition
}

Value Evaluator::cell(const CellAddress& addr) {
    if (auto it = memo_.find(addr); it != memo_.end())
        return it->second;
    if (in_progress_.count(addr))
        return Value::error(ErrorKind::Cycle);
    const Cell* c = wb_.find_cell(addr);
    if (!c)
        return Value::empty();
    if (const Value* v = c->literal())
        return *v;
    in_progress_.insert(addr);
    Value result = eval(*c->formula()->ast, addr.sheet);
    in_progress_.erase(addr);
    memo_[addr] = result;
    return result;
}

Value Evaluator::expr(const Expr& e, const std::string& context_sheet) {
    return eval(e, context_sheet);
}

Value Evaluator::expr(const ExprPtr& e, const std::string& context_sheet) {
    return eval(*e, context_sheet);
}

Value Evaluator::eval(const Expr& raw, const std::string& sheet) {
    const Expr& e = strip_parens(raw);
    if (const auto* n = std::get_if<NumberLit>(&e.node))
        return Value::number(n->value);
    if (const auto* t = std::get_if<TextLit>(&e.node))
        return Value::text(t->value);
    if (const auto* b = std::get_if<BoolLit>(&e.node))
        return Value::boolean(b->value);
    if (const auto* r = std::get_if<CellRef>(&e.node))
        return cell({r->sheet.empty() ? sheet : r->sheet, r->column, r->row});
    if (std::get_if<RangeRef>(&e.node))
        return Value::error(ErrorKind::Value); // a bare range is not a scalar
    if (const auto* n = std::get_if<NameRef>(&e.node)) {
        auto target = wb_.lookup_name(n->name);
        if (!target)
            return Value::error(ErrorKind::Name);
        if (target->is_range)
            return Value::error(ErrorKind::Value);
        return cell(target->start);
    }
    if (const auto* f = std::get_if<FuncCall>(&e.node))
        return eval_call(*f, sheet);
    if (const auto* b = std::get_if<BinaryOp>(&e.node))
        return eval_binary(*b, sheet);
    if (const auto* u = std::get_if<UnaryOp>(&e.node))
        return eval_unary(*u, sheet);
    return Value::error(ErrorKind::Value);
}

Value Evaluator::eval_binary(const BinaryOp& op, const std::string& sheet) {
    Value a = eval(*op.left, sheet);
    Value b = eval(*op.right, sheet);
    if (is_comparison(op.op))
        return compare(op.op, a, b);
    if (op.op == BinaryOpKind::Concat) {
        if (a.is_error())
            return a;
        if (b.is_error())
            return b;
        return Value::text(concat_text(a) + concat_text(b));
    }
    return arithmetic(op.op, a, b);
}

Value Evaluator::eval_unary(const UnaryOp& op, const std::string& sheet) {
    Value v = eval(*op.operand, sheet);
    if (v.is_error())
        return v;
    double x = 0;
    if (v.is_number())
        x = v.as_number();
    else if (v.is_empty())
        x = 0;
    else if (v.is_boolean())
        x = v.as_boolean() ? 1 : 0;
    else
        return Value::error(ErrorKind::Value);
    switch (op.op) {
    case UnaryOpKind::Minus:
        return Value::number(-x);
    case UnaryOpKind::Plus:
        return Value::number(x);
    case UnaryOpKind::Percent:
        return Value::number(x / 100.0);
    }
    return Value::error(ErrorKind::Value);
}

std::optional<Evaluator::Rect> Evaluator::resolve_range(const Expr& raw,
                                                        const std::string& sheet) {
    const Expr& e = strip_parens(raw);
    if (const auto* r = std::get_if<RangeRef>(&e.node)) {
        Rect rect;
        rect.sheet = r->start.sheet.empty() ? sheet : r->start.sheet;
        rect.col1 = std::min(r->start.column, r->end.column);
        rect.col2 = std::max(r->start.column, r->end.column);
        rect.row1 = std::min(r->start.row, r->end.row);
        rect.row2 = std::max(r->start.row, r->end.row);
        return rect;
    }
    if (const auto* n = std::get_if<NameRef>(&e.node)) {
        auto target = wb_.lookup_name(n->name);
        if (!target)
            return std::nullopt;
        Rect rect;
        rect.sheet = target->start.sheet;
        rect.col1 = std::min(target->start.column, target->end.column);
        rect.col2 = std::max(target->start.column, target->end.column);
        rect.row1 = std::min(target->start.row, target->end.row);
        rect.row2 = std::max(target->start.row, target->end.row);
        return rect;
    }
    if (const auto* c = std::get_if<CellRef>(&e.node)) {
        Rect rect;
        rect.sheet = c->sheet.empty() ? sheet : c->sheet;
        rect.col1 = rect.col2 = c->column;
        rect.row1 = rect.row2 = c->row;
        return rect;
    }
    return std::nullopt;
}

Value Evaluator::eval_lookup(const FuncCall& call, const std::string& sheet, bool vertical) {
    if (call.args.size() != 3 && call.args.size() != 4)
        return Value::error(ErrorKind::Value);
    Value key = eval(*call.args[0], sheet);
    if (key.is_error())
        return key;
    auto rect = resolve_range(*call.args[1], sheet);
    if (!rect)
        return Value::error(ErrorKind::Value);
    Value index_v = eval(*call.args[2], sheet);
    if (index_v.is_error())
        return index_v;
    if (!index_v.is_number())
        return Value::error(ErrorKind::Value);
    int index = static_cast<int>(index_v.as_number());
    if (index < 1)
        return Value::error(ErrorKind::Value);

    // Exact match only: a fourth argument of TRUE, or no fourth argument,
    // is an approximate-match request and is rejected.
    if (call.args.size() < 4)
        return Value::error(ErrorKind::Value);
    Value mode = to_condition(eval(*call.args[3], sheet));
    if (mode.is_error())
        return mode;
    if (mode.as_boolean())
        return Value::error(ErrorKind::Value);

    if (vertical) {
        if (rect->col1 + index - 1 > rect->col2)
            return Value::error(ErrorKind::Ref);
        for (int row = rect->row1; row <= rect->row2; ++row) {
            Value probe = cell({rect->sheet, rect->col1, row});
            if (probe.is_error())
                continue; // error cells never match
            if (loose_equal(probe, key))
                return cell({rect->sheet, rect->col1 + index - 1, row});
        }
    } else {
        if (rect->row1 + index - 1 > rect->row2)
            return Value::error(ErrorKind::Ref);
        for (int col = rect->col1; col <= rect->col2; ++col) {
            Value probe = cell({rect->sheet, col, rect->row1});
            if (probe.is_error())
                continue;
            if (loose_equal(probe, key))
                return cell({rect->sheet, col, rect->row1 + index - 1});
        }
    }
    return Value::error(ErrorKind::NA);
}

Value Evaluator::eval_call(const FuncCall& call, const std::string& sheet) {
    const std::string& name = call.name;

    if (name == "IF") {
        if (call.args.size() != 2 && call.args.size() != 3)
            return Value::error(ErrorKind::Value);
        Value cond = to_condition(eval(*call.args[0], sheet));
        if (cond.is_error())
            return cond;
        // Lazy by contract: the untaken branch is never evaluated.
        if (cond.as_boolean())
            return eval(*call.args[1], sheet);
        if (call.args.size() == 3)
            return eval(*call.args[2], sheet);
        return Value::boolean(false);
    }

    if (name == "NOT") {
        if (call.args.size() != 1)
            return Value::error(ErrorKind::Value);
        Value v = to_condition(eval(*call.args[0], sheet));
        if (v.is_error())
            return v;
        return Value::boolean(!v.as_boolean());
    }

    if (name == "AND" || name == "OR") {
        if (call.args.empty())
            return Value::error(ErrorKind::Value);
        // All arguments evaluate (no short-circuit), matching spreadsheets.
        bool acc = name == "AND";
        Value first_error = Value::empty();
        for (const auto& arg : call.args) {
            Value v = to_condition(eval(*arg, sheet));
            if (v.is_error()) {
                if (!first_error.is_error())
                    first_error = v;
                continue;
            }
            if (name == "AND")
                acc = acc && v.as_boolean();
            else
                acc = acc || v.as_boolean();
        }
        if (first_error.is_error())
            return first_error;
        return Value::boolean(acc);
    }

    if (name == "IFERROR") {
        if (call.args.size() != 2)
            return Value::error(ErrorKind::Value);
        Value v = eval(*call.args[0], sheet);
        if (v.is_error())
            return eval(*call.args[1], sheet);
        return v;
    }

    if (name == "VLOOKUP")
        return eval_lookup(call, sheet, true);
    if (name == "HLOOKUP")
        return eval_lookup(call, sheet, false);

    return Value::error(ErrorKind::Name); // unknown function
}

Value evaluate_cell(const Workbook& wb, const CellAddress& addr) {
    Evaluator ev(wb);
    return ev.cell(addr);
}

Value evaluate_expr(const Workbook& wb, const Expr& e) {
    Evaluator ev(wb);
    return ev.expr(e);
}

Value evaluate_expr(const Workbook& wb, const ExprPtr& e) {
    Evaluator ev(wb);
    return ev.expr(e);
}

} // namespace unnest
