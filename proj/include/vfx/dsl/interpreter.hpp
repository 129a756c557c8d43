#pragma once

#include "vfx/assets/catalog.hpp"
#include "vfx/core/error.hpp"
#include "vfx/dsl/ast.hpp"
#include "vfx/dsl/builtins.hpp"
#include "vfx/geometry/support.hpp"
#include "vfx/scene/representation.hpp"
#include "vfx/sim/physics.hpp"

#include <string>
#include <vector>

namespace vfx::dsl {

/// Minimum horizontal spacing between placement points sampled on one object.
inline constexpr double kPointSpacing = 0.3;

struct ExecutionOptions {
    AssetCatalog* catalog = nullptr;  // required by retrieve_* builtins
    ScaleEstimator scale;
    ContactParams contact;
    SupportParams support;
    int frames = 48;
    double fps = 24.0;
    uint64_t seed = 0;
    int max_loop = kDefaultMaxLoop;
};

struct ExecutionReport {
    Timeline timeline;                          // merged result written to rep.timeline
    std::vector<std::string> touched_objects;   // sorted
    std::vector<std::string> inserted_objects;  // in insertion order
    std::vector<std::string> warnings;
    std::vector<std::string> unsupported;       // builtins or effects recorded but not rendered
};

/// A module error raised while running a statement. `statement` is the
/// pre-order statement index, or -1 for the post-program simulation.
class RuntimeFault : public Error {
public:
    RuntimeFault(int statement, SourcePos pos, ErrorKind cause, const std::string& message);

    int statement() const noexcept { return statement_; }
    SourcePos pos() const noexcept { return pos_; }
    ErrorKind cause() const noexcept { return cause_; }

private:
    int statement_;
    SourcePos pos_;
    ErrorKind cause_;
};

/// Validates (InvalidProgram with the formatted diagnostics), then runs the
/// statements in order against `rep`. After the last statement, inserted
/// physics objects are simulated and trajectories animated; the merged
/// timeline replaces rep.timeline when the program produced any animation or
/// event. Edits made before a fault stay in `rep`. Throws RuntimeFault.
ExecutionReport execute_program(const Program& program, SceneRepresentation& rep, const ExecutionOptions& options);

}  // namespace vfx::dsl
