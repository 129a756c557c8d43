#pragma once

#include "vfx/core/image.hpp"
#include "vfx/scene/camera.hpp"
#include "vfx/scene/gaussians.hpp"
#include "vfx/scene/lighting.hpp"
#include "vfx/scene/mesh.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace vfx {

/// Reconstructed scene: immutable after load.
struct SceneBundle {
    TriangleMesh mesh;
    GaussianCloud gaussians;
    std::vector<CameraView> cameras;
    std::vector<Rgb8Image> frames;  // one per camera
    std::vector<MaskImage> masks;   // one per camera; 0 = background
    std::map<uint16_t, std::string> labels;
    std::optional<EnvMap> env_map;
    std::vector<Emitter> emitters;
    SceneType scene_type = SceneType::outdoor;

    /// Mask ids whose label text equals `label`.
    std::set<uint16_t> label_ids(const std::string& label) const;
};

/// Throws InvariantViolation naming the offending record.
void validate_bundle(const SceneBundle& bundle);

/// Directory layout: mesh.obj, gaussians.txt, cameras.json, frames/NNNN.png,
/// masks/NNNN.png + masks/labels.json, env.pfm (optional), scene.json.
SceneBundle load_scene_bundle(const std::string& root);
void save_scene_bundle(const SceneBundle& bundle, const std::string& root);

// Individual file formats.
TriangleMesh parse_obj(std::string_view text, const std::string& name);
std::string format_obj(const TriangleMesh& mesh);
GaussianCloud parse_gaussians(std::string_view text, const std::string& name);
std::string format_gaussians(const GaussianCloud& cloud);

}  // namespace vfx
