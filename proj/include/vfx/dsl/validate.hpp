#pragma once

#include "vfx/dsl/ast.hpp"
#include "vfx/dsl/builtins.hpp"

#include <string>
#include <vector>

namespace vfx::dsl {

enum class DiagnosticKind { unknown_builtin, arity, type, undefined_variable, loop_bound, reserved_name };
std::string_view to_string(DiagnosticKind k);

struct Diagnostic {
    DiagnosticKind kind;
    SourcePos pos;
    int statement = 0;
    std::string message;
};

/// Static checks: unknown builtins, arity, argument and operator types,
/// use before assignment, loop bounds (end >= start, at most `max_loop`
/// iterations), and assignment to the predefined `scene`. Empty = valid.
std::vector<Diagnostic> validate_program(const Program& program, int max_loop = kDefaultMaxLoop);

/// "line:col: [kind] message" per diagnostic.
std::string format_diagnostics(const std::vector<Diagnostic>& diagnostics);

}  // namespace vfx::dsl
