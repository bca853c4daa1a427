#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace unnest {

// Byte offsets into the original formula text. Synthesized nodes keep
// the default zero span; structural equality never looks at spans.
struct Span {
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
};

enum class BinaryOpKind {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Concat,
    Add,
    Sub,
    Mul,
    Div,
    Pow,
};

enum class UnaryOpKind {
    Minus,
    Plus,
    Percent, // postfix: x% == x/100
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct NumberLit {
    double value = 0;
};

struct TextLit {
    std::string value;
};

struct BoolLit {
    bool value = false;
};

struct CellRef {
    std::string sheet; // empty = resolved against the referencing cell's sheet
    int column = 1;    // 1-based, A == 1
    int row = 1;       // 1-based
    bool column_absolute = false;
    bool row_absolute = false;
};

struct RangeRef {
    CellRef start;
    CellRef end;
};

struct NameRef {
    std::string name;
};

struct FuncCall {
    std::string name; // stored uppercase
    std::vector<ExprPtr> args;
};

struct BinaryOp {
    BinaryOpKind op;
    ExprPtr left;
    ExprPtr right;
};

struct UnaryOp {
    UnaryOpKind op;
    ExprPtr operand;
};

struct Paren {
    ExprPtr inner;
};

struct Expr {
    std::variant<NumberLit, TextLit, BoolLit, CellRef, RangeRef, NameRef, FuncCall,
                 BinaryOp, UnaryOp, Paren>
        node;
    Span span;
};

// Builders for synthesized nodes (span left zero).
ExprPtr make_number(double v);
ExprPtr make_text(std::string v);
ExprPtr make_bool(bool v);
ExprPtr make_cellref(CellRef ref);
ExprPtr make_range(RangeRef range);
ExprPtr make_name(std::string name);
ExprPtr make_call(std::string name, std::vector<ExprPtr> args);
ExprPtr make_binary(BinaryOpKind op, ExprPtr left, ExprPtr right);
ExprPtr make_unary(UnaryOpKind op, ExprPtr operand);
ExprPtr make_paren(ExprPtr inner);

// Unwraps any number of Paren wrappers.
const Expr& strip_parens(const Expr& e);
ExprPtr strip_parens(const ExprPtr& e);

// Structural equality, ignoring spans and treating Paren as transparent:
// "=(1+2)" equals "=1+2". Function-name comparison is exact (names are
// stored case-normalized by the parser).
bool ast_equal(const Expr& a, const Expr& b);
bool ast_equal(const ExprPtr& a, const ExprPtr& b);

bool is_if_call(const Expr& e);
const FuncCall* as_func(const Expr& e, const char* name);

// Number of IF calls anywhere in the tree.
int count_ifs(const Expr& e);

// Maximum number of IF calls on any root-to-leaf path.
int nesting_depth(const Expr& e);

std::string op_token(BinaryOpKind op);

} // namespace unnest
