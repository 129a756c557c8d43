#include "vfx/dsl/validate.hpp"

#include <map>

namespace vfx::dsl {

std::string_view to_string(DiagnosticKind k) {
    switch (k) {
        case DiagnosticKind::unknown_builtin: return "unknown builtin";
        case DiagnosticKind::arity: return "arity";
        case DiagnosticKind::type: return "type";
        case DiagnosticKind::undefined_variable: return "undefined variable";
        case DiagnosticKind::loop_bound: return "loop bound";
        case DiagnosticKind::reserved_name: return "reserved name";
    }
    return "?";
}

namespace {

class Checker {
public:
    explicit Checker(int max_loop) : max_loop_(max_loop) { vars_["scene"] = Type::scene; }

    void block(const std::vector<Stmt>& stmts) {
        for (const Stmt& s : stmts) statement(s);
    }

    std::vector<Diagnostic> diagnostics;

private:
    void report(DiagnosticKind k, SourcePos pos, std::string msg) {
        diagnostics.push_back({k, pos, statement_, std::move(msg)});
    }

    void statement(const Stmt& s) {
        statement_ = s.index;
        switch (s.kind) {
            case StmtKind::assign: {
                const Type t = expr(s.value);
                if (s.name == "scene") report(DiagnosticKind::reserved_name, s.pos, "cannot assign to 'scene'");
                else vars_[s.name] = t == Type::unit ? Type::any : t;
                if (t == Type::unit) report(DiagnosticKind::type, s.value.pos, "assigned expression has no value");
                break;
            }
            case StmtKind::expr: expr(s.value); break;
            case StmtKind::loop:
                if (s.to < s.from)
                    report(DiagnosticKind::loop_bound, s.pos, "loop end " + std::to_string(s.to) + " is below its start");
                else if (s.to - s.from > max_loop_)
                    report(DiagnosticKind::loop_bound, s.pos,
                           "loop runs " + std::to_string(s.to - s.from) + " times, limit is " + std::to_string(max_loop_));
                if (s.name == "scene") report(DiagnosticKind::reserved_name, s.pos, "cannot use 'scene' as a loop variable");
                else vars_[s.name] = Type::number;
                block(s.body);
                statement_ = s.index;
                break;
        }
    }

    Type mismatch(const Expr& e, const std::string& what) {
        report(DiagnosticKind::type, e.pos, what);
        return Type::any;
    }

    Type expr(const Expr& e) {
        switch (e.kind) {
            case ExprKind::number: return Type::number;
            case ExprKind::string: return Type::text;
            case ExprKind::boolean: return Type::boolean;
            case ExprKind::variable: {
                auto it = vars_.find(e.text);
                if (it == vars_.end()) {
                    report(DiagnosticKind::undefined_variable, e.pos, "'" + e.text + "' is used before it is assigned");
                    return Type::any;
                }
                return it->second;
            }
            case ExprKind::list: {
                std::vector<Type> items;
                for (const Expr& a : e.args) items.push_back(expr(a));
                const auto all = [&](Type t) {
                    for (Type i : items)
                        if (i != t && i != Type::any) return false;
                    return true;
                };
                if (items.size() == 3 && all(Type::number)) return Type::vec3;
                if (all(Type::vec3)) return Type::point_list;
                return mismatch(e, "a list must hold three numbers (a vector) or vectors (a point list)");
            }
            case ExprKind::negate: {
                const Type t = expr(e.args[0]);
                if (t == Type::number || t == Type::vec3 || t == Type::any) return t;
                return mismatch(e, "cannot negate a " + std::string(to_string(t)));
            }
            case ExprKind::binary: return binary(e);
            case ExprKind::field: {
                const Type base = expr(e.args[0]);
                const Type t = field_type(base, e.text);
                if (t == Type::unit)
                    return mismatch(e, "no field '" + e.text + "' on a " + std::string(to_string(base)));
                return t;
            }
            case ExprKind::call: return call(e);
        }
        return Type::any;
    }

    Type binary(const Expr& e) {
        const Type a = expr(e.args[0]), b = expr(e.args[1]);
        if (a == Type::any || b == Type::any) {
            if (a == Type::vec3 || b == Type::vec3) return Type::vec3;
            return (a == Type::number || b == Type::number) && (e.op == '+' || e.op == '-') ? Type::number : Type::any;
        }
        const auto is = [&](Type x, Type y) { return a == x && b == y; };
        switch (e.op) {
            case '+':
            case '-':
                if (is(Type::number, Type::number)) return Type::number;
                if (is(Type::vec3, Type::vec3)) return Type::vec3;
                break;
            case '*':
                if (is(Type::number, Type::number)) return Type::number;
                if (is(Type::vec3, Type::number) || is(Type::number, Type::vec3)) return Type::vec3;
                break;
            case '/':
                if (is(Type::number, Type::number)) return Type::number;
                if (is(Type::vec3, Type::number)) return Type::vec3;
                break;
        }
        return mismatch(e, "operator '" + std::string(1, e.op) + "' does not apply to " + std::string(to_string(a)) +
                               " and " + std::string(to_string(b)));
    }

    Type call(const Expr& e) {
        std::vector<Type> args;
        for (const Expr& a : e.args) args.push_back(expr(a));
        const BuiltinSignature* sig = find_builtin(e.text);
        if (!sig) {
            report(DiagnosticKind::unknown_builtin, e.pos, "unknown builtin '" + e.text + "'");
            return Type::any;
        }
        if (args.size() < sig->min_arity() || args.size() > sig->params.size()) {
            const std::string want = sig->min_arity() == sig->params.size()
                                         ? std::to_string(sig->params.size())
                                         : std::to_string(sig->min_arity()) + " to " + std::to_string(sig->params.size());
            report(DiagnosticKind::arity, e.pos,
                   e.text + " takes " + want + " arguments, got " + std::to_string(args.size()));
            return sig->returns;
        }
        for (size_t i = 0; i < args.size(); ++i) {
            const Param& p = sig->params[i];
            if (args[i] != p.type && args[i] != Type::any)
                report(DiagnosticKind::type, e.args[i].pos,
                       e.text + " argument " + std::to_string(i + 1) + " ('" + p.name + "') must be " +
                           std::string(to_string(p.type)) + ", got " + std::string(to_string(args[i])));
        }
        return sig->returns;
    }

    int max_loop_;
    int statement_ = 0;
    std::map<std::string, Type> vars_;
};

}  // namespace

std::vector<Diagnostic> validate_program(const Program& program, int max_loop) {
    Checker c(max_loop);
    c.block(program.statements);
    return std::move(c.diagnostics);
}

std::string format_diagnostics(const std::vector<Diagnostic>& diagnostics) {
    std::string out;
    for (const auto& d : diagnostics)
        out += std::to_string(d.pos.line) + ":" + std::to_string(d.pos.column) + ": [" + std::string(to_string(d.kind)) +
               "] " + d.message + "\n";
    return out;
}

}  // namespace vfx::dsl
