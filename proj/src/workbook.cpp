#include "unnest/workbook.hpp"

#include "unnest/parser.hpp"
#include "unnest/printer.hpp"

#include <cctype>
#include <charconv>
#include <sstream>

namespace unnest {

namespace {

std::string upper(std::string s) {
    for (char& c : s)
        c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool is_number_token(const std::string& s, double& out) {
    if (s.empty())
        return false;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (*first == '+' || *first == '-')
        ++first; // from_chars does not eat an explicit sign
    auto [p, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || p != last)
        return false;
    if (s[0] == '-')
        out = -out;
    return true;
}

} // namespace

CellAddress parse_address(const std::string& text) {
    std::string t = trim(text);
    CellAddress addr;
    std::string body = t;
    if (auto bang = t.find('!'); bang != std::string::npos) {
        addr.sheet = t.substr(0, bang);
        body = t.substr(bang + 1);
        if (addr.sheet.empty())
            throw BadAddress("empty sheet name in '" + text + "'");
    }
    std::size_t i = 0;
    if (i < body.size() && body[i] == '$')
        ++i;
    long long col = 0;
    std::size_t letters = 0;
    while (i < body.size() && std::isalpha(static_cast<unsigned char>(body[i]))) {
        col = col * 26 + (std::toupper(static_cast<unsigned char>(body[i])) - 'A' + 1);
        if (col > kMaxColumn)
            throw BadAddress("column out of range in '" + text + "'");
        ++letters;
        ++i;
    }
    if (i < body.size() && body[i] == '$')
        ++i;
    long long row = 0;
    std::size_t digits = 0;
    while (i < body.size() && std::isdigit(static_cast<unsigned char>(body[i]))) {
        row = row * 10 + (body[i] - '0');
        if (row > kMaxRow)
            throw BadAddress("row out of range in '" + text + "'");
        ++digits;
        ++i;
    }
    if (letters == 0 || digits == 0 || i != body.size() || row < 1)
        throw BadAddress("bad cell address '" + text + "'");
    addr.column = static_cast<int>(col);
    addr.row = static_cast<int>(row);
    return addr;
}

std::string format_address(const CellAddress& addr) {
    std::string s;
    if (addr.sheet != "Sheet1") {
        s += addr.sheet;
        s.push_back('!');
    }
    s += column_letters(addr.column);
    s += std::to_string(addr.row);
    return s;
}

Cell Workbook::get_cell(const CellAddress& addr) const {
    auto it = cells_.find(addr);
    return it == cells_.end() ? Cell{} : it->second;
}

const Cell* Workbook::find_cell(const CellAddress& addr) const {
    auto it = cells_.find(addr);
    return it == cells_.end() ? nullptr : &it->second;
}

void Workbook::set_cell(const CellAddress& addr, Cell cell) {
    cells_[addr] = std::move(cell);
}

void Workbook::set_literal(const CellAddress& addr, Value v) {
    cells_[addr] = Cell{std::move(v)};
}

void Workbook::set_formula(const CellAddress& addr, const std::string& source) {
    FormulaCell f;
    f.ast = parse_formula(source);
    f.source = source;
    cells_[addr] = Cell{std::move(f)};
}

void Workbook::set_formula(const CellAddress& addr, const ExprPtr& ast) {
    FormulaCell f;
    f.ast = ast;
    f.source = print_formula(ast);
    cells_[addr] = Cell{std::move(f)};
}

void Workbook::erase_cell(const CellAddress& addr) {
    cells_.erase(addr);
}

void Workbook::define_name(const std::string& name, NameTarget target) {
    names_[upper(name)] = {name, std::move(target)};
}

std::optional<NameTarget> Workbook::lookup_name(const std::string& name) const {
    auto it = names_.find(upper(name));
    if (it == names_.end())
        return std::nullopt;
    return it->second.second;
}

bool Workbook::cell_empty(const CellAddress& addr) const {
    const Cell* c = find_cell(addr);
    if (!c)
        return true;
    const Value* v = c->literal();
    return v && v->is_empty();
}

Value parse_literal(const std::string& token) {
    if (token.empty() || token == "\"\"")
        return Value::empty();
    double num = 0;
    if (is_number_token(token, num))
        return Value::number(num);
    std::string up = upper(token);
    if (up == "TRUE")
        return Value::boolean(true);
    if (up == "FALSE")
        return Value::boolean(false);
    return Value::text(token);
}

std::string format_literal(const Value& v) {
    if (v.is_empty())
        return "\"\"";
    if (v.is_error())
        return v.display(); // not loadable; errors never appear in saved files
    return v.display();
}

Workbook load_cell_list(const std::string& document) {
    Workbook wb;
    std::istringstream in(document);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#')
            continue;
        std::size_t sep = t.find(":=");
        if (sep == std::string::npos)
            throw CellListError("expected ':=' separator", lineno);
        std::string lhs = trim(t.substr(0, sep));
        std::string rhs = trim(t.substr(sep + 2));

        if (lhs.rfind("name ", 0) == 0 || lhs.rfind("name\t", 0) == 0) {
            std::string ident = trim(lhs.substr(5));
            if (ident.empty())
                throw CellListError("missing name identifier", lineno);
            try {
                NameTarget target;
                if (auto colon = rhs.find(':'); colon != std::string::npos) {
                    target.start = parse_address(rhs.substr(0, colon));
                    target.end = parse_address(rhs.substr(colon + 1));
                    if (target.end.sheet == "Sheet1" && target.start.sheet != "Sheet1")
                        target.end.sheet = target.start.sheet;
                    target.is_range = true;
                } else {
                    target.start = target.end = parse_address(rhs);
                }
                wb.define_name(ident, target);
            } catch (const BadAddress& e) {
                throw CellListError(e.what(), lineno);
            }
            continue;
        }

        CellAddress addr;
        try {
            addr = parse_address(lhs);
        } catch (const BadAddress& e) {
            throw CellListError(e.what(), lineno);
        }
        if (wb.find_cell(addr))
            throw DuplicateCell("duplicate cell " + format_address(addr) + " at line " +
                                std::to_string(lineno));
        if (!rhs.empty() && rhs[0] == '=') {
            try {
                wb.set_formula(addr, rhs);
            } catch (const ParseError& e) {
                throw CellListError(std::string(e.what()) + " (offset " +
                                        std::to_string(e.offset) + ")",
                                    lineno);
            }
        } else {
            wb.set_literal(addr, parse_literal(rhs));
        }
    }
    return wb;
}

std::string save_cell_list(const Workbook& wb) {
    std::string out;
    for (const auto& [key, entry] : wb.names()) {
        out += "name " + entry.first + " := " + format_address(entry.second.start);
        if (entry.second.is_range)
            out += ":" + format_address(entry.second.end);
        out += "\n";
    }
    for (const auto& [addr, cell] : wb.cells()) {
        out += format_address(addr) + " := ";
        if (const FormulaCell* f = cell.formula())
            out += f->source;
        else
            out += format_literal(*cell.literal());
        out += "\n";
    }
    return out;
}

} // namespace unnest
