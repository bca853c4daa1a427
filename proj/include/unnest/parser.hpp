#pragma once

#include "unnest/ast.hpp"

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace unnest {

struct ParseError : std::runtime_error {
    ParseError(std::string message, std::size_t offset)
        : std::runtime_error(std::move(message)), offset(offset) {}
    std::size_t offset; // byte offset into the input text
};

struct SyntaxError : ParseError {
    using ParseError::ParseError;
};

struct UnbalancedParens : ParseError {
    using ParseError::ParseError;
};

struct UnterminatedString : ParseError {
    using ParseError::ParseError;
};

// Parses A1-style formula text, with or without a leading "=".
//
// Precedence, loosest to tightest: comparison, & concatenation, additive,
// multiplicative, ^ exponent, unary -/+, postfix %. All binary operators
// are left-associative, including ^ (spreadsheet convention), and unary
// minus binds tighter than ^ so "-2^2" is (-2)^2.
ExprPtr parse_formula(std::string_view text);

} // namespace unnest
