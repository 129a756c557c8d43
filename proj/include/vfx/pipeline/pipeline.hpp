#pragma once

#include "vfx/core/error.hpp"
#include "vfx/scene/camera.hpp"
#include "vfx/scene/representation.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vfx {

enum class CameraTrack { original, orbit };

struct RunConfig {
    std::string bundle_path;
    std::optional<std::string> instruction;
    std::optional<std::string> program_path;
    std::string out_dir = "out";
    uint64_t seed = 0;
    int frames = 48;
    double fps = 24.0;
    std::optional<int> spp;                  // default 64; effect frames use 8x
    int supersample = 2;
    bool offline = false;                    // use the canned-response stub instead of an endpoint
    CameraTrack camera = CameraTrack::original;
    std::optional<std::string> catalog_path; // default: <bundle>/catalog when present
    std::optional<std::string> llm_config;   // endpoint JSON, required online
    bool strict_unsupported = false;         // fail (exit 3) instead of warning on unrendered effects
};

/// Throws ConfigError unless exactly one of instruction/program is set, frames >= 1, fps > 0,
/// spp >= 1 and supersample >= 1.
void validate_run_config(const RunConfig& cfg);

/// The four failure categories plus `config` for invalid invocations.
enum class FailureCategory { scene_modeling, editing_modules, unsupported_function, code_generation, config };
std::string_view to_string(FailureCategory c);
int exit_code(FailureCategory c);  // 1, 2, 3, 4, 64

struct FailureReport {
    FailureCategory category = FailureCategory::editing_modules;
    ErrorKind kind = ErrorKind::PreconditionFailed;  // for RuntimeFault, the underlying module error
    std::string detail;
    std::optional<int> statement;
};

FailureCategory category_of(ErrorKind kind);
/// Total over every exception; non-engine exceptions count as editing_modules.
FailureReport report_failure_category(const std::exception& err);

/// Circle about the scene mesh's bounding-box center at the mean camera height
/// and mean horizontal camera distance, starting at the first camera's azimuth,
/// one revolution over `frames`, with the first camera's intrinsics.
std::vector<CameraView> orbit_cameras(const SceneBundle& bundle, int frames);

/// Recorded cameras stretched over the clip: frame k uses camera k * N / frames.
size_t original_camera_index(size_t camera_count, int frame, int frames);

struct RunResult {
    int exit_code = 0;
    std::optional<FailureReport> failure;
    std::vector<std::string> inserted_objects;
    std::vector<std::string> warnings;
    std::vector<std::string> unsupported;
    int frames_written = 0;
};

/// load bundle -> program (file, offline stub or endpoint, with repair) ->
/// validate -> execute and simulate -> render passes per frame -> composite ->
/// assemble. Writes <out>/frames/NNNN.png + manifest.json, timeline.txt,
/// program.dsl, run/attempt_N.txt and report.json (also on failure). Never throws.
RunResult run_pipeline(const RunConfig& cfg);

}  // namespace vfx
