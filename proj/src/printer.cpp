#include "unnest/printer.hpp"

#include "unnest/value.hpp"

#include <charconv>

namespace unnest {

namespace {

// Higher binds tighter. Atoms get the top level so they never take parens.
int precedence_of(BinaryOpKind op) {
    switch (op) {
    case BinaryOpKind::Eq:
    case BinaryOpKind::Ne:
    case BinaryOpKind::Lt:
    case BinaryOpKind::Le:
    case BinaryOpKind::Gt:
    case BinaryOpKind::Ge:
        return 1;
    case BinaryOpKind::Concat:
        return 2;
    case BinaryOpKind::Add:
    case BinaryOpKind::Sub:
        return 3;
    case BinaryOpKind::Mul:
    case BinaryOpKind::Div:
        return 4;
    case BinaryOpKind::Pow:
        return 5;
    }
    return 0;
}

constexpr int kUnaryPrec = 6;
constexpr int kPercentPrec = 7;
constexpr int kAtomPrec = 8;

void emit(const Expr& e, int parent_prec, std::string& out);

int node_precedence(const Expr& raw) {
    const Expr& e = strip_parens(raw);
    if (const auto* b = std::get_if<BinaryOp>(&e.node))
        return precedence_of(b->op);
    if (const auto* u = std::get_if<UnaryOp>(&e.node))
        return u->op == UnaryOpKind::Percent ? kPercentPrec : kUnaryPrec;
    return kAtomPrec;
}

void emit_text(const std::string& s, std::string& out) {
    out.push_back('"');
    for (char c : s) {
        if (c == '"')
            out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
}

void emit(const Expr& raw, int parent_prec, std::string& out) {
    const Expr& e = strip_parens(raw);
    struct V {
        int parent_prec;
        std::string& out;
        void operator()(const NumberLit& n) const { out += format_number(n.value); }
        void operator()(const TextLit& t) const { emit_text(t.value, out); }
        void operator()(const BoolLit& b) const { out += b.value ? "TRUE" : "FALSE"; }
        void operator()(const CellRef& r) const { out += format_cellref(r); }
        void operator()(const RangeRef& r) const {
            out += format_cellref(r.start);
            out.push_back(':');
            out += format_cellref(r.end);
        }
        void operator()(const NameRef& n) const { out += n.name; }
        void operator()(const FuncCall& f) const {
            out += f.name;
            out.push_back('(');
            for (std::size_t i = 0; i < f.args.size(); ++i) {
                if (i)
                    out += ", ";
                emit(*f.args[i], 0, out);
            }
            out.push_back(')');
        }
        void operator()(const BinaryOp& b) const {
            int prec = precedence_of(b.op);
            bool need = prec < parent_prec;
            if (need)
                out.push_back('(');
            emit(*b.left, prec, out);
            out += op_token(b.op);
            // Left-associative everywhere: equal precedence on the right
            // still needs parens ("1-(2-3)").
            emit(*b.right, prec + 1, out);
            if (need)
                out.push_back(')');
        }
        void operator()(const UnaryOp& u) const {
            if (u.op == UnaryOpKind::Percent) {
                bool need = kPercentPrec < parent_prec;
                if (need)
                    out.push_back('(');
                emit(*u.operand, kPercentPrec, out);
                out.push_back('%');
                if (need)
                    out.push_back(')');
                return;
            }
            bool need = kUnaryPrec < parent_prec;
            if (need)
                out.push_back('(');
            out.push_back(u.op == UnaryOpKind::Minus ? '-' : '+');
            emit(*u.operand, kUnaryPrec, out);
            if (need)
                out.push_back(')');
        }
        void operator()(const Paren&) const {} // unreachable, stripped above
    };
    std::visit(V{parent_prec, out}, e.node);
}

} // namespace

std::string column_letters(int column) {
    std::string s;
    while (column > 0) {
        --column;
        s.insert(s.begin(), static_cast<char>('A' + column % 26));
        column /= 26;
    }
    return s;
}

std::string format_cellref(const CellRef& ref) {
    std::string s;
    if (!ref.sheet.empty()) {
        s += ref.sheet;
        s.push_back('!');
    }
    if (ref.column_absolute)
        s.push_back('$');
    s += column_letters(ref.column);
    if (ref.row_absolute)
        s.push_back('$');
    s += std::to_string(ref.row);
    return s;
}

std::string format_expr(const Expr& e) {
    std::string out;
    emit(e, 0, out);
    return out;
}

std::string format_expr(const ExprPtr& e) {
    return format_expr(*e);
}

std::string print_formula(const Expr& e) {
    return "=" + format_expr(e);
}

std::string print_formula(const ExprPtr& e) {
    return print_formula(*e);
}

} // namespace unnest
