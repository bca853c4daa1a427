#pragma once

#include "unnest/ast.hpp"

#include <string>

namespace unnest {

// Canonical text without the leading "=": single space after argument
// commas, "$" per absolute flags, parentheses only where precedence
// requires them (Paren nodes carry no weight of their own).
std::string format_expr(const Expr& e);
std::string format_expr(const ExprPtr& e);

// format_expr with the leading "=". parse_formula(print_formula(e))
// equals e up to spans and redundant parentheses.
std::string print_formula(const Expr& e);
std::string print_formula(const ExprPtr& e);

// "B10", "$E$12", "Model!A1" -- used by both the printer and workbook I/O.
std::string column_letters(int column);
std::string format_cellref(const CellRef& ref);

} // namespace unnest
