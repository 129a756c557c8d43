#pragma once

#include "vfx/geometry/bvh.hpp"
#include "vfx/scene/bundle.hpp"
#include "vfx/scene/object.hpp"
#include "vfx/scene/timeline.hpp"

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace vfx {

/// Mutable editing state over an immutable bundle. The background mesh is the
/// bundle mesh with removed faces deleted and holes patched; `background_origin`
/// maps each background face back to its bundle face (-1 for patch faces).
class SceneRepresentation {
public:
    explicit SceneRepresentation(std::shared_ptr<const SceneBundle> bundle);

    const SceneBundle& bundle() const { return *bundle_; }
    std::shared_ptr<const SceneBundle> bundle_ptr() const { return bundle_; }

    std::map<std::string, SceneObject> objects;
    std::set<uint32_t> removed_faces;
    std::set<uint32_t> removed_gaussians;
    Timeline timeline;

    const TriangleMesh& background() const { return background_; }
    const std::vector<int64_t>& background_origin() const { return origin_; }
    /// BVH over the current background mesh; rebuilt lazily after edits.
    const Bvh& background_bvh() const;
    /// BVH over the untouched bundle mesh (face indices = bundle face indices).
    const Bvh& bundle_bvh() const;

    /// Removes bundle faces from the background and patches the hole they leave.
    void cut_background(const std::vector<uint32_t>& bundle_faces);

    /// Fresh id of the form `<name>_<n>`.
    std::string new_object_id(const std::string& name);
    SceneObject& add_object(SceneObject obj);
    SceneObject& object(const std::string& id);
    const SceneObject& object(const std::string& id) const;

    /// Objects rendered as inserted content: inserted and not part of the background.
    std::vector<const SceneObject*> foreground_objects() const;
    /// Gaussians of the bundle that are not removed.
    GaussianCloud background_gaussians() const;

    /// Checks removed indices and per-object invariants.
    void validate() const;

private:
    std::shared_ptr<const SceneBundle> bundle_;
    TriangleMesh background_;
    std::vector<int64_t> origin_;
    mutable std::unique_ptr<Bvh> background_bvh_;
    mutable std::unique_ptr<Bvh> bundle_bvh_;
    std::map<std::string, int> id_counters_;
};

}  // namespace vfx
