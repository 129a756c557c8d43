#include "vfx/dsl/ast.hpp"

#include "vfx/core/error.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <set>

namespace vfx::dsl {

bool operator==(const Expr& a, const Expr& b) {
    if (a.kind != b.kind || a.args != b.args) return false;
    switch (a.kind) {
        case ExprKind::number: return a.number == b.number || (std::isnan(a.number) && std::isnan(b.number));
        case ExprKind::boolean: return a.boolean == b.boolean;
        case ExprKind::binary: return a.op == b.op;
        case ExprKind::list:
        case ExprKind::negate: return true;
        default: return a.text == b.text;
    }
}

bool operator==(const Stmt& a, const Stmt& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case StmtKind::assign: return a.name == b.name && a.value == b.value;
        case StmtKind::expr: return a.value == b.value;
        case StmtKind::loop: return a.name == b.name && a.from == b.from && a.to == b.to && a.body == b.body;
    }
    return false;
}

bool operator==(const Program& a, const Program& b) { return a.statements == b.statements; }

namespace {

enum class Tok { ident, number, string, kw_for, kw_in, kw_true, kw_false, range, sym, newline, end };

struct Token {
    Tok type;
    std::string text;  // identifier, symbol, or decoded string
    double number = 0;
    SourcePos pos;
};

std::string describe(const Token& t) {
    switch (t.type) {
        case Tok::ident: return "identifier '" + t.text + "'";
        case Tok::number: return "number '" + t.text + "'";
        case Tok::string: return "string";
        case Tok::newline: return "end of line";
        case Tok::end: return "end of input";
        default: return "'" + t.text + "'";
    }
}

[[noreturn]] void syntax_error(SourcePos pos, const std::string& expected, const std::string& found) {
    throw Error(ErrorKind::SyntaxError,
                std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": expected " + expected + ", found " + found);
}

std::vector<Token> lex(std::string_view src) {
    std::vector<Token> out;
    int line = 1, col = 1;
    size_t i = 0;
    int nesting = 0;  // open ( and [
    const auto advance = [&](size_t n) {
        for (size_t k = 0; k < n; ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    while (i < src.size()) {
        const char c = src[i];
        const SourcePos pos{line, col};
        if (c == '#') {
            while (i < src.size() && src[i] != '\n') advance(1);
        } else if (c == '\n' || c == ';') {
            if (nesting == 0) out.push_back({Tok::newline, c == ';' ? ";" : "\\n", 0, pos});
            advance(1);
        } else if (c == ' ' || c == '\t' || c == '\r') {
            advance(1);
        } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                   (c == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
            size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            if (j + 1 < src.size() && src[j] == '.' && std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
                ++j;
                while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            } else if (j < src.size() && src[j] == '.' && !(j + 1 < src.size() && src[j + 1] == '.')) {
                ++j;  // "5." is a number; "5.." starts a range
            }
            if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
                size_t k = j + 1;
                if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
                if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
                    while (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) ++k;
                    j = k;
                }
            }
            const std::string text(src.substr(i, j - i));
            double v = 0;
            std::from_chars(text.data(), text.data() + text.size(), v);
            if (text[0] == '.') v = std::stod("0" + text);
            out.push_back({Tok::number, text, v, pos});
            advance(j - i);
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
            const std::string word(src.substr(i, j - i));
            Tok t = Tok::ident;
            if (word == "for") t = Tok::kw_for;
            else if (word == "in") t = Tok::kw_in;
            else if (word == "true") t = Tok::kw_true;
            else if (word == "false") t = Tok::kw_false;
            out.push_back({t, word, 0, pos});
            advance(j - i);
        } else if (c == '"') {
            std::string value;
            advance(1);
            while (true) {
                if (i >= src.size() || src[i] == '\n') syntax_error(pos, "closing '\"'", "end of line");
                if (src[i] == '"') break;
                if (src[i] == '\\') {
                    if (i + 1 >= src.size()) syntax_error(pos, "escape sequence", "end of input");
                    const char e = src[i + 1];
                    switch (e) {
                        case 'n': value += '\n'; break;
                        case 't': value += '\t'; break;
                        case '"': value += '"'; break;
                        case '\\': value += '\\'; break;
                        default: syntax_error({line, col}, "one of \\n \\t \\\" \\\\", std::string("'\\") + e + "'");
                    }
                    advance(2);
                } else {
                    value += src[i];
                    advance(1);
                }
            }
            advance(1);
            out.push_back({Tok::string, value, 0, pos});
        } else if (c == '.' && i + 1 < src.size() && src[i + 1] == '.') {
            out.push_back({Tok::range, "..", 0, pos});
            advance(2);
        } else if (std::string_view("=+-*/(){}[],.").find(c) != std::string_view::npos) {
            if (c == '(' || c == '[') ++nesting;
            if ((c == ')' || c == ']') && nesting > 0) --nesting;
            out.push_back({Tok::sym, std::string(1, c), 0, pos});
            advance(1);
        } else {
            syntax_error(pos, "a token", "character '" + std::string(1, c) + "'");
        }
    }
    out.push_back({Tok::end, "", 0, {line, col}});
    return out;
}

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    Program program() {
        Program p;
        p.statements = block(false);
        int index = 0;
        number(p.statements, index);
        return p;
    }

private:
    static void number(std::vector<Stmt>& stmts, int& index) {
        for (Stmt& s : stmts) {
            s.index = index++;
            number(s.body, index);
        }
    }

    const Token& peek(size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
    bool is_sym(const Token& t, char c) const { return t.type == Tok::sym && t.text[0] == c; }
    Token take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

    void expect_sym(char c) {
        if (!is_sym(peek(), c)) syntax_error(peek().pos, std::string("'") + c + "'", describe(peek()));
        take();
    }

    void skip_separators() {
        while (peek().type == Tok::newline) take();
    }

    std::vector<Stmt> block(bool braced) {
        std::vector<Stmt> out;
        skip_separators();
        while (!(braced ? is_sym(peek(), '}') : peek().type == Tok::end)) {
            if (peek().type == Tok::end) syntax_error(peek().pos, "'}'", describe(peek()));
            out.push_back(statement());
            const Token& t = peek();
            if (t.type == Tok::newline) {
                skip_separators();
            } else if (!(braced && is_sym(t, '}')) && t.type != Tok::end) {
                syntax_error(t.pos, braced ? "end of line or '}'" : "end of line", describe(t));
            }
        }
        return out;
    }

    int64_t integer() {
        const Token t = take();
        if (t.type != Tok::number || t.text.find_first_not_of("0123456789") != std::string::npos)
            syntax_error(t.pos, "integer literal", describe(t));
        int64_t v = 0;
        const auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (ec != std::errc()) syntax_error(t.pos, "integer literal in range", describe(t));
        return v;
    }

    Stmt statement() {
        Stmt s;
        s.pos = peek().pos;
        if (peek().type == Tok::kw_for) {
            take();
            const Token var = take();
            if (var.type != Tok::ident) syntax_error(var.pos, "loop variable", describe(var));
            if (peek().type != Tok::kw_in) syntax_error(peek().pos, "'in'", describe(peek()));
            take();
            s.kind = StmtKind::loop;
            s.name = var.text;
            s.from = integer();
            if (peek().type != Tok::range) syntax_error(peek().pos, "'..'", describe(peek()));
            take();
            s.to = integer();
            expect_sym('{');
            s.body = block(true);
            expect_sym('}');
            return s;
        }
        if (peek().type == Tok::ident && is_sym(peek(1), '=')) {
            s.kind = StmtKind::assign;
            s.name = take().text;
            take();
            s.value = expr();
            return s;
        }
        s.kind = StmtKind::expr;
        s.value = expr();
        return s;
    }

    Expr binary(Expr lhs, char op, Expr rhs, SourcePos pos) {
        Expr e;
        e.kind = ExprKind::binary;
        e.op = op;
        e.pos = pos;
        e.args.push_back(std::move(lhs));
        e.args.push_back(std::move(rhs));
        return e;
    }

    Expr expr() {
        Expr lhs = term();
        while (is_sym(peek(), '+') || is_sym(peek(), '-')) {
            const Token op = take();
            lhs = binary(std::move(lhs), op.text[0], term(), op.pos);
        }
        return lhs;
    }

    Expr term() {
        Expr lhs = unary();
        while (is_sym(peek(), '*') || is_sym(peek(), '/')) {
            const Token op = take();
            lhs = binary(std::move(lhs), op.text[0], unary(), op.pos);
        }
        return lhs;
    }

    Expr unary() {
        if (is_sym(peek(), '-')) {
            Expr e;
            e.kind = ExprKind::negate;
            e.pos = take().pos;
            e.args.push_back(unary());
            return e;
        }
        Expr e = primary();
        while (is_sym(peek(), '.')) {
            take();
            const Token name = take();
            if (name.type != Tok::ident) syntax_error(name.pos, "field name", describe(name));
            Expr f;
            f.kind = ExprKind::field;
            f.text = name.text;
            f.pos = name.pos;
            f.args.push_back(std::move(e));
            e = std::move(f);
        }
        return e;
    }

    std::vector<Expr> list_until(char close) {
        std::vector<Expr> items;
        if (is_sym(peek(), close)) {
            take();
            return items;
        }
        while (true) {
            items.push_back(expr());
            if (is_sym(peek(), ',')) {
                take();
                continue;
            }
            if (!is_sym(peek(), close)) syntax_error(peek().pos, std::string("',' or '") + close + "'", describe(peek()));
            take();
            return items;
        }
    }

    Expr primary() {
        const Token t = take();
        Expr e;
        e.pos = t.pos;
        switch (t.type) {
            case Tok::number:
                e.kind = ExprKind::number;
                e.number = t.number;
                return e;
            case Tok::string:
                e.kind = ExprKind::string;
                e.text = t.text;
                return e;
            case Tok::kw_true:
            case Tok::kw_false:
                e.kind = ExprKind::boolean;
                e.boolean = t.type == Tok::kw_true;
                return e;
            case Tok::ident:
                e.text = t.text;
                if (is_sym(peek(), '(')) {
                    take();
                    e.kind = ExprKind::call;
                    e.args = list_until(')');
                } else {
                    e.kind = ExprKind::variable;
                }
                return e;
            case Tok::sym:
                if (t.text[0] == '(') {
                    Expr inner = expr();
                    expect_sym(')');
                    return inner;
                }
                if (t.text[0] == '[') {
                    e.kind = ExprKind::list;
                    e.args = list_until(']');
                    return e;
                }
                break;
            default: break;
        }
        syntax_error(t.pos, "expression", describe(t));
    }

    std::vector<Token> toks_;
    size_t pos_ = 0;
};

std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            default: out += c;
        }
    }
    return out + "\"";
}

int precedence(const Expr& e) {
    if (e.kind == ExprKind::binary) return (e.op == '+' || e.op == '-') ? 1 : 2;
    if (e.kind == ExprKind::negate) return 3;
    return 4;
}

std::string print_expr(const Expr& e);

std::string print_operand(const Expr& child, int min_prec) {
    const std::string s = print_expr(child);
    return precedence(child) < min_prec ? "(" + s + ")" : s;
}

std::string print_list(const std::vector<Expr>& items) {
    std::string out;
    for (size_t i = 0; i < items.size(); ++i) out += (i ? ", " : "") + print_expr(items[i]);
    return out;
}

std::string print_expr(const Expr& e) {
    switch (e.kind) {
        case ExprKind::number: return format_number(e.number);
        case ExprKind::string: return quote(e.text);
        case ExprKind::boolean: return e.boolean ? "true" : "false";
        case ExprKind::list: return "[" + print_list(e.args) + "]";
        case ExprKind::variable: return e.text;
        case ExprKind::call: return e.text + "(" + print_list(e.args) + ")";
        case ExprKind::binary: {
            const int p = precedence(e);
            // Left-associative: the right operand needs parentheses at equal precedence.
            return print_operand(e.args[0], p) + " " + e.op + " " + print_operand(e.args[1], p + 1);
        }
        case ExprKind::negate: return "-" + print_operand(e.args[0], 3);
        case ExprKind::field: return print_operand(e.args[0], 4) + "." + e.text;
    }
    return {};
}

void print_block(const std::vector<Stmt>& stmts, int depth, std::string& out) {
    const std::string indent(4 * depth, ' ');
    for (const Stmt& s : stmts) {
        switch (s.kind) {
            case StmtKind::assign: out += indent + s.name + " = " + print_expr(s.value) + "\n"; break;
            case StmtKind::expr: out += indent + print_expr(s.value) + "\n"; break;
            case StmtKind::loop:
                out += indent + "for " + s.name + " in " + std::to_string(s.from) + ".." + std::to_string(s.to) + " {\n";
                print_block(s.body, depth + 1, out);
                out += indent + "}\n";
                break;
        }
    }
}

void flatten_into(const std::vector<Stmt>& stmts, std::vector<const Stmt*>& out) {
    for (const Stmt& s : stmts) {
        out.push_back(&s);
        flatten_into(s.body, out);
    }
}

}  // namespace

Program parse_program(std::string_view source) { return Parser(lex(source)).program(); }

std::string pretty_print(const Expr& expr) { return print_expr(expr); }

std::string pretty_print(const Program& program) {
    std::string out;
    print_block(program.statements, 0, out);
    return out;
}

std::vector<const Stmt*> flatten(const Program& program) {
    std::vector<const Stmt*> out;
    flatten_into(program.statements, out);
    return out;
}

}  // namespace vfx::dsl
