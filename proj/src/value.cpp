#include "unnest/value.hpp"

#include <array>
#include <charconv>

namespace unnest {

std::string error_code(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::Div0:
        return "#DIV/0!";
    case ErrorKind::NA:
        return "#N/A";
    case ErrorKind::Value:
        return "#VALUE!";
    case ErrorKind::Name:
        return "#NAME?";
    case ErrorKind::Ref:
        return "#REF!";
    case ErrorKind::Cycle:
        return "#CYCLE!";
    }
    return "#ERR!";
}

std::string format_number(double v) {
    std::array<char, 32> buf{};
    auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc())
        return "0";
    return std::string(buf.data(), p);
}

std::string Value::display() const {
    if (is_empty())
        return "";
    if (is_number())
        return format_number(as_number());
    if (is_text())
        return as_text();
    if (is_boolean())
        return as_boolean() ? "TRUE" : "FALSE";
    return error_code(as_error());
}

} // namespace unnest
