#include "unnest/ast.hpp"

#include <algorithm>
#include <cctype>

namespace unnest {

namespace {

ExprPtr wrap(Expr e) {
    return std::make_shared<const Expr>(std::move(e));
}

bool ieq(const std::string& a, const std::string& b) {
    if (a.size() != b.size())
        return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::toupper(static_cast<unsigned char>(a[i])) !=
            std::toupper(static_cast<unsigned char>(b[i])))
            return false;
    return true;
}

} // namespace

ExprPtr make_number(double v) {
    return wrap(Expr{NumberLit{v}, {}});
}
ExprPtr make_text(std::string v) {
    return wrap(Expr{TextLit{std::move(v)}, {}});
}
ExprPtr make_bool(bool v) {
    return wrap(Expr{BoolLit{v}, {}});
}
ExprPtr make_cellref(CellRef ref) {
    return wrap(Expr{std::move(ref), {}});
}
ExprPtr make_range(RangeRef range) {
    return wrap(Expr{std::move(range), {}});
}
ExprPtr make_name(std::string name) {
    return wrap(Expr{NameRef{std::move(name)}, {}});
}
ExprPtr make_call(std::string name, std::vector<ExprPtr> args) {
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return wrap(Expr{FuncCall{std::move(name), std::move(args)}, {}});
}
ExprPtr make_binary(BinaryOpKind op, ExprPtr left, ExprPtr right) {
    return wrap(Expr{BinaryOp{op, std::move(left), std::move(right)}, {}});
}
ExprPtr make_unary(UnaryOpKind op, ExprPtr operand) {
    return wrap(Expr{UnaryOp{op, std::move(operand)}, {}});
}
ExprPtr make_paren(ExprPtr inner) {
    return wrap(Expr{Paren{std::move(inner)}, {}});
}

const Expr& strip_parens(const Expr& e) {
    const Expr* p = &e;
    while (const auto* par = std::get_if<Paren>(&p->node))
        p = par->inner.get();
    return *p;
}

ExprPtr strip_parens(const ExprPtr& e) {
    ExprPtr p = e;
    while (const auto* par = std::get_if<Paren>(&p->node))
        p = par->inner;
    return p;
}

bool ast_equal(const Expr& lhs, const Expr& rhs) {
    const Expr& a = strip_parens(lhs);
    const Expr& b = strip_parens(rhs);
    if (a.node.index() != b.node.index())
        return false;
    struct Cmp {
        const Expr& other;
        bool operator()(const NumberLit& n) const {
            return n.value == std::get<NumberLit>(other.node).value;
        }
        bool operator()(const TextLit& t) const {
            return t.value == std::get<TextLit>(other.node).value;
        }
        bool operator()(const BoolLit& bl) const {
            return bl.value == std::get<BoolLit>(other.node).value;
        }
        bool operator()(const CellRef& r) const {
            const auto& o = std::get<CellRef>(other.node);
            return r.sheet == o.sheet && r.column == o.column && r.row == o.row &&
                   r.column_absolute == o.column_absolute && r.row_absolute == o.row_absolute;
        }
        bool operator()(const RangeRef& r) const {
            const auto& o = std::get<RangeRef>(other.node);
            auto same = [](const CellRef& x, const CellRef& y) {
                return x.sheet == y.sheet && x.column == y.column && x.row == y.row &&
                       x.column_absolute == y.column_absolute && x.row_absolute == y.row_absolute;
            };
            return same(r.start, o.start) && same(r.end, o.end);
        }
        bool operator()(const NameRef& n) const {
            return ieq(n.name, std::get<NameRef>(other.node).name);
        }
        bool operator()(const FuncCall& f) const {
            const auto& o = std::get<FuncCall>(other.node);
            if (f.name != o.name || f.args.size() != o.args.size())
                return false;
            for (std::size_t i = 0; i < f.args.size(); ++i)
                if (!ast_equal(*f.args[i], *o.args[i]))
                    return false;
            return true;
        }
        bool operator()(const BinaryOp& bo) const {
            const auto& o = std::get<BinaryOp>(other.node);
            return bo.op == o.op && ast_equal(*bo.left, *o.left) && ast_equal(*bo.right, *o.right);
        }
        bool operator()(const UnaryOp& u) const {
            const auto& o = std::get<UnaryOp>(other.node);
            return u.op == o.op && ast_equal(*u.operand, *o.operand);
        }
        bool operator()(const Paren&) const { return false; } // unreachable, stripped above
    };
    return std::visit(Cmp{b}, a.node);
}

bool ast_equal(const ExprPtr& a, const ExprPtr& b) {
    if (a == b)
        return true;
    if (!a || !b)
        return false;
    return ast_equal(*a, *b);
}

bool is_if_call(const Expr& e) {
    const auto* f = std::get_if<FuncCall>(&strip_parens(e).node);
    return f && f->name == "IF";
}

const FuncCall* as_func(const Expr& e, const char* name) {
    const auto* f = std::get_if<FuncCall>(&strip_parens(e).node);
    if (f && f->name == name)
        return f;
    return nullptr;
}

int count_ifs(const Expr& e) {
    struct Counter {
        int operator()(const NumberLit&) const { return 0; }
        int operator()(const TextLit&) const { return 0; }
        int operator()(const BoolLit&) const { return 0; }
        int operator()(const CellRef&) const { return 0; }
        int operator()(const RangeRef&) const { return 0; }
        int operator()(const NameRef&) const { return 0; }
        int operator()(const FuncCall& f) const {
            int n = f.name == "IF" ? 1 : 0;
            for (const auto& a : f.args)
                n += count_ifs(*a);
            return n;
        }
        int operator()(const BinaryOp& b) const { return count_ifs(*b.left) + count_ifs(*b.right); }
        int operator()(const UnaryOp& u) const { return count_ifs(*u.operand); }
        int operator()(const Paren& p) const { return count_ifs(*p.inner); }
    };
    return std::visit(Counter{}, e.node);
}

int nesting_depth(const Expr& e) {
    struct Depth {
        int operator()(const NumberLit&) const { return 0; }
        int operator()(const TextLit&) const { return 0; }
        int operator()(const BoolLit&) const { return 0; }
        int operator()(const CellRef&) const { return 0; }
        int operator()(const RangeRef&) const { return 0; }
        int operator()(const NameRef&) const { return 0; }
        int operator()(const FuncCall& f) const {
            int child = 0;
            for (const auto& a : f.args)
                child = std::max(child, nesting_depth(*a));
            return (f.name == "IF" ? 1 : 0) + child;
        }
        int operator()(const BinaryOp& b) const {
            return std::max(nesting_depth(*b.left), nesting_depth(*b.right));
        }
        int operator()(const UnaryOp& u) const { return nesting_depth(*u.operand); }
        int operator()(const Paren& p) const { return nesting_depth(*p.inner); }
    };
    return std::visit(Depth{}, e.node);
}

std::string op_token(BinaryOpKind op) {
    switch (op) {
    case BinaryOpKind::Eq:
        return "=";
    case BinaryOpKind::Ne:
        return "<>";
    case BinaryOpKind::Lt:
        return "<";
    case BinaryOpKind::Le:
        return "<=";
    case BinaryOpKind::Gt:
        return ">";
    case BinaryOpKind::Ge:
        return ">=";
    case BinaryOpKind::Concat:
        return "&";
    case BinaryOpKind::Add:
        return "+";
    case BinaryOpKind::Sub:
        return "-";
    case BinaryOpKind::Mul:
        return "*";
    case BinaryOpKind::Div:
        return "/";
    case BinaryOpKind::Pow:
        return "^";
    }
    return "?";
}

} // namespace unnest
