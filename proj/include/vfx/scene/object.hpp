#pragma once

#include "vfx/core/math.hpp"
#include "vfx/scene/gaussians.hpp"
#include "vfx/scene/mesh.hpp"

#include <optional>
#include <string>
#include <vector>

namespace vfx {

/// Surface response parameters; scalars live in [0,1], tint is a non-negative multiplier.
struct MaterialSpec {
    double metallic = 0.0;
    double specular = 0.5;
    double roughness = 0.5;
    Vec3 color_tint = Vec3::Ones();
    std::optional<std::string> texture_set;  // material library id
    std::optional<Vec3> texture_albedo;      // mean albedo of the texture set

    friend bool operator==(const MaterialSpec&, const MaterialSpec&) = default;
};

enum class ObjectSource { extracted, asset };

/// Per-object editing record. Every catalog function reads and writes these.
struct SceneObject {
    std::string object_id;
    std::string name;
    ObjectSource source = ObjectSource::asset;
    TriangleMesh mesh;                       // object frame
    std::optional<GaussianCloud> gaussians;  // object frame
    Similarity transform;                    // world_from_object
    bool physics_enabled = false;
    bool fracture_enabled = false;
    bool break_at_start = false;
    std::optional<std::vector<Vec3>> trajectory;  // nullopt = static
    std::optional<MaterialSpec> material;
    std::vector<size_t> events;  // indices into the representation's timeline events
    std::optional<Vec3> real_size;
    bool inserted = false;  // part of the rendered scene (assets start outside it)

    // Extraction bookkeeping: which bundle faces and Gaussians this object came
    // from, and whether they are still part of the rendered background.
    std::vector<uint32_t> source_faces;
    std::vector<uint32_t> source_gaussians;
    bool in_background = false;

    // Baked per-frame transforms of animated assets, relative to `transform`.
    std::vector<Similarity> baked_animation;

    Aabb world_bounds() const;
};

/// Throws InvariantViolation when scale <= 0 or an extracted object lacks Gaussians.
void validate_object(const SceneObject& obj);

}  // namespace vfx
