#pragma once

#include <cstdint>
#include <string>

namespace oracle {

/// Random DSL source text that parses: assignments, calls, arithmetic with
/// arbitrary (redundant) parentheses, vectors, strings with escapes, fields,
/// nested loops, comments, and mixed `;` / newline separators. The programs
/// are syntactically valid only; they are not meant to validate.
std::string random_program_source(uint64_t seed, int statements = 8);

/// Penetration depth of a point into the axis-aligned solid [lo, hi] (0 outside).
double box_penetration(const double p[3], const double lo[3], const double hi[3]);

}  // namespace oracle
