#include "unnest/parser.hpp"

#include <cctype>
#include <charconv>
#include <optional>
#include <vector>

namespace unnest {

namespace {

// Excel 2007 grid bounds; anything addressing beyond them lexes as a name.
constexpr int kMaxColumn = 16384;
constexpr int kMaxRow = 1048576;

enum class Tok {
    Number,
    String,
    Word, // identifier, cell reference, TRUE/FALSE -- classified by the parser
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Amp,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Percent,
    LParen,
    RParen,
    Comma,
    Colon,
    Bang,
    End,
};

struct Token {
    Tok kind;
    std::string text;
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
    double number = 0;
};

class Lexer {
  public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_ws();
            std::uint32_t start = pos_;
            if (pos_ >= src_.size()) {
                out.push_back({Tok::End, "", start, start, 0});
                break;
            }
            char c = src_[pos_];
            if (std::isdigit(static_cast<unsigned char>(c)) ||
                (c == '.' && pos_ + 1 < src_.size() &&
                 std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
                out.push_back(lex_number());
            } else if (c == '"') {
                out.push_back(lex_string());
            } else if (c == '$' || c == '_' || std::isalpha(static_cast<unsigned char>(c))) {
                out.push_back(lex_word());
            } else {
                out.push_back(lex_punct());
            }
        }
        return out;
    }

  private:
    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
            ++pos_;
    }

    Token lex_number() {
        std::uint32_t start = pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
            ++pos_;
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                ++pos_;
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t save = pos_;
            ++pos_;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-'))
                ++pos_;
            if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                    ++pos_;
            } else {
                pos_ = static_cast<std::uint32_t>(save); // "1e" is number 1 then word "e"
            }
        }
        std::string text(src_.substr(start, pos_ - start));
        double v = 0;
        auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc() || p != text.data() + text.size())
            throw SyntaxError("malformed number '" + text + "'", start);
        return {Tok::Number, std::move(text), start, pos_, v};
    }

    Token lex_string() {
        std::uint32_t start = pos_;
        ++pos_; // opening quote
        std::string value;
        while (true) {
            if (pos_ >= src_.size())
                throw UnterminatedString("unterminated string literal", start);
            char c = src_[pos_];
            if (c == '"') {
                if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '"') {
                    value.push_back('"'); // doubled quote escape
                    pos_ += 2;
                    continue;
                }
                ++pos_;
                break;
            }
            value.push_back(c);
            ++pos_;
        }
        return {Tok::String, std::move(value), start, pos_, 0};
    }

    // Cell references and identifiers share one token shape; the parser
    // decides which is which ("$B$10" vs "Test1" vs "VLOOKUP").
    Token lex_word() {
        std::uint32_t start = pos_;
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '$' || c == '_' || c == '.' ||
                std::isalnum(static_cast<unsigned char>(c)))
                ++pos_;
            else
                break;
        }
        return {Tok::Word, std::string(src_.substr(start, pos_ - start)), start, pos_, 0};
    }

    Token lex_punct() {
        std::uint32_t start = pos_;
        char c = src_[pos_];
        auto one = [&](Tok k) {
            ++pos_;
            return Token{k, std::string(1, c), start, pos_, 0};
        };
        switch (c) {
        case '=':
            return one(Tok::Eq);
        case '<':
            if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
                pos_ += 2;
                return {Tok::Ne, "<>", start, pos_, 0};
            }
            if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '=') {
                pos_ += 2;
                return {Tok::Le, "<=", start, pos_, 0};
            }
            return one(Tok::Lt);
        case '>':
            if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '=') {
                pos_ += 2;
                return {Tok::Ge, ">=", start, pos_, 0};
            }
            return one(Tok::Gt);
        case '&':
            return one(Tok::Amp);
        case '+':
            return one(Tok::Plus);
        case '-':
            return one(Tok::Minus);
        case '*':
            return one(Tok::Star);
        case '/':
            return one(Tok::Slash);
        case '^':
            return one(Tok::Caret);
        case '%':
            return one(Tok::Percent);
        case '(':
            return one(Tok::LParen);
        case ')':
            return one(Tok::RParen);
        case ',':
            return one(Tok::Comma);
        case ':':
            return one(Tok::Colon);
        case '!':
            return one(Tok::Bang);
        default:
            throw SyntaxError(std::string("unexpected character '") + c + "'", start);
        }
    }

    std::string_view src_;
    std::uint32_t pos_ = 0;
};

// Splits "$B$10" into its parts; returns nullopt when the word is not a
// well-formed reference or the column/row exceed the grid.
std::optional<CellRef> word_as_cellref(const std::string& w) {
    std::size_t i = 0;
    CellRef ref;
    if (i < w.size() && w[i] == '$') {
        ref.column_absolute = true;
        ++i;
    }
    long long col = 0;
    std::size_t letters = 0;
    while (i < w.size() && std::isalpha(static_cast<unsigned char>(w[i]))) {
        col = col * 26 + (std::toupper(static_cast<unsigned char>(w[i])) - 'A' + 1);
        if (col > kMaxColumn + 1000000LL)
            return std::nullopt; // clearly a name, avoid overflow
        ++letters;
        ++i;
    }
    if (letters == 0)
        return std::nullopt;
    if (i < w.size() && w[i] == '$') {
        ref.row_absolute = true;
        ++i;
    }
    long long row = 0;
    std::size_t digits = 0;
    while (i < w.size() && std::isdigit(static_cast<unsigned char>(w[i]))) {
        row = row * 10 + (w[i] - '0');
        if (row > kMaxRow)
            return std::nullopt;
        ++digits;
        ++i;
    }
    if (digits == 0 || i != w.size())
        return std::nullopt;
    if (col < 1 || col > kMaxColumn || row < 1)
        return std::nullopt;
    ref.column = static_cast<int>(col);
    ref.row = static_cast<int>(row);
    return ref;
}

bool word_is_plain_identifier(const std::string& w) {
    if (w.empty() || w.find('$') != std::string::npos)
        return false;
    if (!std::isalpha(static_cast<unsigned char>(w[0])) && w[0] != '_')
        return false;
    return true;
}

bool word_iequals(const std::string& w, const char* upper) {
    std::size_t i = 0;
    for (; i < w.size() && upper[i]; ++i)
        if (std::toupper(static_cast<unsigned char>(w[i])) != upper[i])
            return false;
    return i == w.size() && upper[i] == '\0';
}

class Parser {
  public:
    explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    ExprPtr run() {
        ExprPtr e = parse_comparison();
        if (peek().kind == Tok::RParen)
            throw UnbalancedParens("unmatched ')'", peek().begin);
        if (peek().kind != Tok::End)
            throw SyntaxError("expected end of formula, found '" + peek().text + "'",
                              peek().begin);
        return e;
    }

  private:
    const Token& peek(std::size_t ahead = 0) const {
        std::size_t i = pos_ + ahead;
        return i < toks_.size() ? toks_[i] : toks_.back();
    }
    const Token& advance() { return toks_[pos_++]; }
    bool match(Tok k) {
        if (peek().kind == k) {
            ++pos_;
            return true;
        }
        return false;
    }

    static ExprPtr spanned(Expr e, std::uint32_t begin, std::uint32_t end) {
        e.span = {begin, end};
        return std::make_shared<const Expr>(std::move(e));
    }

    ExprPtr binary_chain(ExprPtr (Parser::*next)(),
                         std::initializer_list<std::pair<Tok, BinaryOpKind>> ops) {
        ExprPtr left = (this->*next)();
        while (true) {
            bool advanced = false;
            for (auto [tok, op] : ops) {
                if (peek().kind == tok) {
                    advance();
                    ExprPtr right = (this->*next)();
                    std::uint32_t b = left->span.begin, e = right->span.end;
                    left = spanned(Expr{BinaryOp{op, std::move(left), std::move(right)}, {}}, b, e);
                    advanced = true;
                    break;
                }
            }
            if (!advanced)
                return left;
        }
    }

    ExprPtr parse_comparison() {
        return binary_chain(&Parser::parse_concat, {{Tok::Eq, BinaryOpKind::Eq},
                                                    {Tok::Ne, BinaryOpKind::Ne},
                                                    {Tok::Le, BinaryOpKind::Le},
                                                    {Tok::Ge, BinaryOpKind::Ge},
                                                    {Tok::Lt, BinaryOpKind::Lt},
                                                    {Tok::Gt, BinaryOpKind::Gt}});
    }

    ExprPtr parse_concat() {
        return binary_chain(&Parser::parse_additive, {{Tok::Amp, BinaryOpKind::Concat}});
    }

    ExprPtr parse_additive() {
        return binary_chain(&Parser::parse_multiplicative,
                            {{Tok::Plus, BinaryOpKind::Add}, {Tok::Minus, BinaryOpKind::Sub}});
    }

    ExprPtr parse_multiplicative() {
        return binary_chain(&Parser::parse_power,
                            {{Tok::Star, BinaryOpKind::Mul}, {Tok::Slash, BinaryOpKind::Div}});
    }

    ExprPtr parse_power() {
        return binary_chain(&Parser::parse_unary, {{Tok::Caret, BinaryOpKind::Pow}});
    }

    ExprPtr parse_unary() {
        if (peek().kind == Tok::Minus || peek().kind == Tok::Plus) {
            const Token& t = advance();
            UnaryOpKind op = t.kind == Tok::Minus ? UnaryOpKind::Minus : UnaryOpKind::Plus;
            ExprPtr operand = parse_unary();
            return spanned(Expr{UnaryOp{op, operand}, {}}, t.begin, operand->span.end);
        }
        return parse_postfix();
    }

    ExprPtr parse_postfix() {
        ExprPtr e = parse_primary();
        while (peek().kind == Tok::Percent) {
            const Token& t = advance();
            e = spanned(Expr{UnaryOp{UnaryOpKind::Percent, e}, {}}, e->span.begin, t.end);
        }
        return e;
    }

    ExprPtr parse_primary() {
        const Token& t = peek();
        switch (t.kind) {
        case Tok::Number: {
            advance();
            return spanned(Expr{NumberLit{t.number}, {}}, t.begin, t.end);
        }
        case Tok::String: {
            advance();
            return spanned(Expr{TextLit{t.text}, {}}, t.begin, t.end);
        }
        case Tok::LParen: {
            const Token& open = advance();
            ExprPtr inner = parse_comparison();
            if (peek().kind != Tok::RParen)
                throw UnbalancedParens("expected ')'", peek().begin);
            const Token& close = advance();
            return spanned(Expr{Paren{inner}, {}}, open.begin, close.end);
        }
        case Tok::Word:
            return parse_word();
        case Tok::End:
            throw SyntaxError("expected expression, found end of formula", t.begin);
        default:
            throw SyntaxError("expected expression, found '" + t.text + "'", t.begin);
        }
    }

    ExprPtr parse_word() {
        const Token& t = advance();

        // Sheet-qualified reference: Word '!' Word.
        if (peek().kind == Tok::Bang) {
            if (!word_is_plain_identifier(t.text))
                throw SyntaxError("bad sheet name '" + t.text + "'", t.begin);
            advance(); // '!'
            if (peek().kind != Tok::Word)
                throw SyntaxError("expected cell reference after '" + t.text + "!'",
                                  peek().begin);
            const Token& r = advance();
            auto ref = word_as_cellref(r.text);
            if (!ref)
                throw SyntaxError("bad cell reference '" + r.text + "'", r.begin);
            ref->sheet = t.text;
            return finish_ref(*ref, t.begin, r.end);
        }

        if (peek().kind == Tok::LParen) {
            if (!word_is_plain_identifier(t.text))
                throw SyntaxError("bad function name '" + t.text + "'", t.begin);
            advance(); // '('
            std::vector<ExprPtr> args;
            if (peek().kind != Tok::RParen) {
                args.push_back(parse_comparison());
                while (match(Tok::Comma))
                    args.push_back(parse_comparison());
            }
            if (peek().kind != Tok::RParen)
                throw UnbalancedParens("expected ')' to close argument list", peek().begin);
            const Token& close = advance();
            std::string name = t.text;
            for (char& c : name)
                c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
            return spanned(Expr{FuncCall{std::move(name), std::move(args)}, {}}, t.begin,
                           close.end);
        }

        if (word_iequals(t.text, "TRUE"))
            return spanned(Expr{BoolLit{true}, {}}, t.begin, t.end);
        if (word_iequals(t.text, "FALSE"))
            return spanned(Expr{BoolLit{false}, {}}, t.begin, t.end);

        if (auto ref = word_as_cellref(t.text))
            return finish_ref(*ref, t.begin, t.end);

        if (!word_is_plain_identifier(t.text))
            throw SyntaxError("bad identifier '" + t.text + "'", t.begin);
        return spanned(Expr{NameRef{t.text}, {}}, t.begin, t.end);
    }

    ExprPtr finish_ref(const CellRef& start, std::uint32_t begin, std::uint32_t end) {
        if (peek().kind != Tok::Colon)
            return spanned(Expr{start, {}}, begin, end);
        advance(); // ':'
        if (peek().kind != Tok::Word)
            throw SyntaxError("expected cell reference after ':'", peek().begin);
        const Token& r = advance();
        auto endref = word_as_cellref(r.text);
        if (!endref)
            throw SyntaxError("bad cell reference '" + r.text + "'", r.begin);
        return spanned(Expr{RangeRef{start, *endref}, {}}, begin, r.end);
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

} // namespace

ExprPtr parse_formula(std::string_view text) {
    std::size_t i = 0;
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i])))
        ++i;
    if (i >= text.size())
        throw SyntaxError("empty formula", 0);

    // The leading "=" is consumed here; printing re-adds it.
    std::string_view body = text;
    std::uint32_t base = 0;
    if (text[i] == '=') {
        base = static_cast<std::uint32_t>(i + 1);
        body = text.substr(i + 1);
    }
    if (body.find_first_not_of(" \t\r\n") == std::string_view::npos)
        throw SyntaxError("empty formula", i);

    try {
        Lexer lexer(body);
        Parser parser(lexer.run());
        ExprPtr e = parser.run();
        if (base == 0)
            return e;
        // Shift spans so offsets point into the original text including "=".
        struct Shift {
            std::uint32_t base;
            ExprPtr apply(const ExprPtr& p) const {
                Expr copy = *p;
                copy.span.begin += base;
                copy.span.end += base;
                struct V {
                    const Shift& s;
                    Expr& c;
                    void operator()(FuncCall& f) const {
                        for (auto& a : f.args)
                            a = s.apply(a);
                    }
                    void operator()(BinaryOp& b) const {
                        b.left = s.apply(b.left);
                        b.right = s.apply(b.right);
                    }
                    void operator()(UnaryOp& u) const { u.operand = s.apply(u.operand); }
                    void operator()(Paren& pa) const { pa.inner = s.apply(pa.inner); }
                    template <class T> void operator()(T&) const {}
                };
                std::visit(V{*this, copy}, copy.node);
                return std::make_shared<const Expr>(std::move(copy));
            }
        };
        return Shift{base}.apply(e);
    } catch (ParseError& err) {
        err.offset += base;
        throw;
    }
}

} // namespace unnest
