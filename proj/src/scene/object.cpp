#include "vfx/scene/object.hpp"

#include "vfx/core/error.hpp"

namespace vfx {

Aabb SceneObject::world_bounds() const {
    Aabb box;
    for (const auto& v : mesh.vertices) box.extend(transform.apply(v));
    return box;
}

void validate_object(const SceneObject& obj) {
    const auto fail = [&](const std::string& msg) {
        throw Error(ErrorKind::InvariantViolation, "object " + obj.object_id + ": " + msg);
    };
    if (obj.object_id.empty()) fail("empty object_id");
    if (!(obj.transform.scale > 0) || !std::isfinite(obj.transform.scale)) fail("scale must be positive");
    if (obj.source == ObjectSource::extracted && !obj.gaussians) fail("extracted object without Gaussians");
    if (obj.real_size && !((obj.real_size->array() > 0).all())) fail("real_size must be positive");
    if (obj.material) {
        const auto& m = *obj.material;
        for (double v : {m.metallic, m.specular, m.roughness})
            if (!(v >= 0 && v <= 1)) fail("material scalar outside [0,1]");
        if (!((m.color_tint.array() >= 0).all())) fail("negative material tint");
    }
    if (obj.trajectory && obj.trajectory->size() < 2) fail("trajectory needs at least 2 keypoints");
}

}  // namespace vfx
