#pragma once

#include "unnest/ast.hpp"
#include "unnest/value.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

namespace unnest {

struct BadAddress : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DuplicateCell : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Cell-list file problem, with the 1-based line it occurred on.
struct CellListError : std::runtime_error {
    CellListError(const std::string& message, int line)
        : std::runtime_error("line " + std::to_string(line) + ": " + message), line(line) {}
    int line;
};

constexpr int kMaxColumn = 16384;  // Excel 2007 grid
constexpr int kMaxRow = 1048576;

struct CellAddress {
    std::string sheet = "Sheet1";
    int column = 1;
    int row = 1;

    // Reading order: sheet, then row, then column.
    auto operator<=>(const CellAddress& other) const {
        if (auto c = sheet <=> other.sheet; c != 0)
            return c;
        if (auto c = row <=> other.row; c != 0)
            return c;
        return column <=> other.column;
    }
    bool operator==(const CellAddress&) const = default;
};

// "B10", "AA1", "Model!$E$12" (the "$" markers are accepted and dropped).
CellAddress parse_address(const std::string& text);

// Canonical form; the default sheet prefix is omitted.
std::string format_address(const CellAddress& addr);

struct FormulaCell {
    ExprPtr ast;
    std::string source; // re-parses to ast
};

struct Cell {
    // Literal value or formula. An absent cell reads as an Empty literal.
    std::variant<Value, FormulaCell> content;

    Cell() : content(Value::empty()) {}
    explicit Cell(Value v) : content(std::move(v)) {}
    explicit Cell(FormulaCell f) : content(std::move(f)) {}

    bool is_formula() const { return std::holds_alternative<FormulaCell>(content); }
    const FormulaCell* formula() const { return std::get_if<FormulaCell>(&content); }
    const Value* literal() const { return std::get_if<Value>(&content); }
};

// A defined name resolves to a single address or to a rectangular range.
struct NameTarget {
    CellAddress start;
    CellAddress end;
    bool is_range = false;
};

class Workbook {
  public:
    Cell get_cell(const CellAddress& addr) const;
    const Cell* find_cell(const CellAddress& addr) const;
    void set_cell(const CellAddress& addr, Cell cell);
    void set_literal(const CellAddress& addr, Value v);
    void set_formula(const CellAddress& addr, const std::string& source);
    void set_formula(const CellAddress& addr, const ExprPtr& ast);
    void erase_cell(const CellAddress& addr);

    // Case-insensitive registration and lookup.
    void define_name(const std::string& name, NameTarget target);
    std::optional<NameTarget> lookup_name(const std::string& name) const;

    const std::map<CellAddress, Cell>& cells() const { return cells_; }
    const std::map<std::string, std::pair<std::string, NameTarget>>& names() const {
        return names_;
    }

    // Free for placement purposes: absent or holding an Empty literal.
    bool cell_empty(const CellAddress& addr) const;

  private:
    std::map<CellAddress, Cell> cells_;
    // key: uppercased name -> (original spelling, target)
    std::map<std::string, std::pair<std::string, NameTarget>> names_;
};

// Line-oriented text format:
//   # comment
//   B10 := MH
//   B5 := =IF(B10="Rev", ...)
//   name Test1 := E12
// Literal typing: decimal number; TRUE/FALSE (any case) as boolean; the
// two-character token "" as empty; anything else as text verbatim.
Workbook load_cell_list(const std::string& document);
std::string save_cell_list(const Workbook& wb);

// The literal typing rules by themselves (also used for --drive values).
Value parse_literal(const std::string& token);
std::string format_literal(const Value& v);

} // namespace unnest
