#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace vfx::dsl {

struct SourcePos {
    int line = 1;
    int column = 1;
};

enum class ExprKind { number, string, boolean, list, variable, call, binary, negate, field };

struct Expr {
    ExprKind kind = ExprKind::number;
    double number = 0;
    bool boolean = false;
    std::string text;  // string value, variable, callee or field name
    char op = 0;       // + - * / for binary
    std::vector<Expr> args;  // call arguments, list items, binary operands, negate/field operand
    SourcePos pos;
};

enum class StmtKind { assign, expr, loop };

struct Stmt {
    StmtKind kind = StmtKind::expr;
    std::string name;  // assignment target or loop variable
    Expr value;        // assigned or evaluated expression
    int64_t from = 0, to = 0;  // loop range, end exclusive
    std::vector<Stmt> body;
    int index = 0;  // pre-order position in the program, for error reports
    SourcePos pos;
};

struct Program {
    std::vector<Stmt> statements;
};

/// Structural equality; source positions and statement indices are ignored.
bool operator==(const Expr& a, const Expr& b);
bool operator==(const Stmt& a, const Stmt& b);
bool operator==(const Program& a, const Program& b);

/// Grammar:
///   program := { stmt (NEWLINE | ";") }
///   stmt    := ident "=" expr | expr | "for" ident "in" int ".." int "{" program "}"
///   expr    := term { ("+" | "-") term }      term := unary { ("*" | "/") unary }
///   unary   := "-" unary | postfix            postfix := primary { "." ident }
///   primary := number | string | "true" | "false" | "[" [expr {"," expr}] "]"
///            | ident [ "(" [expr {"," expr}] ")" ] | "(" expr ")"
/// `#` starts a comment. Newlines inside parentheses and brackets are ignored.
/// Throws SyntaxError "line:column: expected ..., found ...".
Program parse_program(std::string_view source);

/// Canonical text: one statement per line, four-space indentation, minimal
/// parentheses. parse_program(pretty_print(p)) == p.
std::string pretty_print(const Program& program);
std::string pretty_print(const Expr& expr);

/// Every statement in pre-order.
std::vector<const Stmt*> flatten(const Program& program);

}  // namespace vfx::dsl
