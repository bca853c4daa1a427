#pragma once

#include <cstdint>
#include <string>
#include <variant>

namespace unnest {

// Spreadsheet error values. These travel in-band through evaluation;
// the evaluator never throws for formula-level failures.
enum class ErrorKind {
    Div0,
    NA,
    Value,
    Name,
    Ref,
    Cycle,
};

std::string error_code(ErrorKind kind);

// A computed cell value: empty, number, text, boolean, or error.
class Value {
  public:
    Value() = default;

    static Value empty() { return Value{}; }
    static Value number(double v) { return Value{Storage{v}}; }
    static Value text(std::string v) { return Value{Storage{std::move(v)}}; }
    static Value boolean(bool v) { return Value{Storage{v}}; }
    static Value error(ErrorKind k) { return Value{Storage{k}}; }

    bool is_empty() const { return std::holds_alternative<std::monostate>(v_); }
    bool is_number() const { return std::holds_alternative<double>(v_); }
    bool is_text() const { return std::holds_alternative<std::string>(v_); }
    bool is_boolean() const { return std::holds_alternative<bool>(v_); }
    bool is_error() const { return std::holds_alternative<ErrorKind>(v_); }

    double as_number() const { return std::get<double>(v_); }
    const std::string& as_text() const { return std::get<std::string>(v_); }
    bool as_boolean() const { return std::get<bool>(v_); }
    ErrorKind as_error() const { return std::get<ErrorKind>(v_); }

    // Exact structural equality: same type and same payload. Number/text
    // coercion rules live in the evaluator, not here.
    bool operator==(const Value& other) const { return v_ == other.v_; }

    // Rendering used by reports and the CLI: numbers in shortest
    // round-trip form, booleans as TRUE/FALSE, errors as #DIV/0! etc.
    std::string display() const;

  private:
    using Storage = std::variant<std::monostate, double, std::string, bool, ErrorKind>;
    explicit Value(Storage v) : v_(std::move(v)) {}
    Storage v_;
};

// Shortest decimal text that parses back to exactly the same double.
std::string format_number(double v);

} // namespace unnest
