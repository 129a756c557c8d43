#include "vfx/scene/representation.hpp"

#include "vfx/core/error.hpp"
#include "vfx/geometry/patch.hpp"

#include <unordered_map>

namespace vfx {

SceneRepresentation::SceneRepresentation(std::shared_ptr<const SceneBundle> bundle)
    : bundle_(std::move(bundle)), background_(bundle_->mesh) {
    origin_.resize(background_.face_count());
    for (size_t f = 0; f < origin_.size(); ++f) origin_[f] = static_cast<int64_t>(f);
}

const Bvh& SceneRepresentation::background_bvh() const {
    if (!background_bvh_) background_bvh_ = std::make_unique<Bvh>(background_);
    return *background_bvh_;
}

const Bvh& SceneRepresentation::bundle_bvh() const {
    if (!bundle_bvh_) bundle_bvh_ = std::make_unique<Bvh>(bundle_->mesh);
    return *bundle_bvh_;
}

void SceneRepresentation::cut_background(const std::vector<uint32_t>& bundle_faces) {
    std::unordered_map<int64_t, uint32_t> current;
    for (size_t f = 0; f < origin_.size(); ++f)
        if (origin_[f] >= 0) current.emplace(origin_[f], static_cast<uint32_t>(f));
    std::vector<uint32_t> local;
    for (uint32_t f : bundle_faces) {
        if (f >= bundle_->mesh.face_count())
            throw Error(ErrorKind::OutOfBounds, "bundle face " + std::to_string(f) + " out of range");
        auto it = current.find(f);
        if (it != current.end()) local.push_back(it->second);
    }
    auto patched = plane_patch_hole(background_, local);
    std::vector<int64_t> origin(patched.face_origin.size());
    for (size_t f = 0; f < origin.size(); ++f)
        origin[f] = patched.face_origin[f] < 0 ? -1 : origin_[patched.face_origin[f]];
    background_ = std::move(patched.mesh);
    origin_ = std::move(origin);
    removed_faces.insert(bundle_faces.begin(), bundle_faces.end());
    background_bvh_.reset();
}

std::string SceneRepresentation::new_object_id(const std::string& name) {
    std::string base;
    for (char c : name) base += (std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
    if (base.empty()) base = "object";
    std::string id;
    do {
        id = base + "_" + std::to_string(id_counters_[base]++);
    } while (objects.count(id));
    return id;
}

SceneObject& SceneRepresentation::add_object(SceneObject obj) {
    if (obj.object_id.empty()) obj.object_id = new_object_id(obj.name);
    if (objects.count(obj.object_id))
        throw Error(ErrorKind::InvariantViolation, "duplicate object_id " + obj.object_id);
    validate_object(obj);
    const std::string id = obj.object_id;
    return objects.emplace(id, std::move(obj)).first->second;
}

SceneObject& SceneRepresentation::object(const std::string& id) {
    auto it = objects.find(id);
    if (it == objects.end()) throw Error(ErrorKind::PreconditionFailed, "no object " + id);
    return it->second;
}

const SceneObject& SceneRepresentation::object(const std::string& id) const {
    auto it = objects.find(id);
    if (it == objects.end()) throw Error(ErrorKind::PreconditionFailed, "no object " + id);
    return it->second;
}

std::vector<const SceneObject*> SceneRepresentation::foreground_objects() const {
    std::vector<const SceneObject*> out;
    for (const auto& [id, obj] : objects)
        if (obj.inserted && !obj.in_background && !obj.mesh.empty()) out.push_back(&obj);
    return out;
}

GaussianCloud SceneRepresentation::background_gaussians() const {
    GaussianCloud out;
    out.reserve(bundle_->gaussians.size());
    for (size_t i = 0; i < bundle_->gaussians.size(); ++i)
        if (!removed_gaussians.count(static_cast<uint32_t>(i))) out.push_back(bundle_->gaussians[i]);
    return out;
}

void SceneRepresentation::validate() const {
    if (!removed_faces.empty() && *removed_faces.rbegin() >= bundle_->mesh.face_count())
        throw Error(ErrorKind::InvariantViolation, "removed face index out of range");
    if (!removed_gaussians.empty() && *removed_gaussians.rbegin() >= bundle_->gaussians.size())
        throw Error(ErrorKind::InvariantViolation, "removed Gaussian index out of range");
    for (const auto& [id, obj] : objects) {
        if (id != obj.object_id) throw Error(ErrorKind::InvariantViolation, "object key mismatch for " + id);
        validate_object(obj);
    }
}

}  // namespace vfx
