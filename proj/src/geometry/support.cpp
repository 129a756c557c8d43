#include "vfx/geometry/support.hpp"

#include "vfx/core/error.hpp"
#include "vfx/core/rng.hpp"

namespace vfx {

bool is_support_face(const Bvh& scene, const TriangleMesh& mesh, uint32_t f,
                     const SupportParams& params) {
    const double cos_limit = std::cos(params.flatness_deg * kPi / 180.0);
    const Vec3 n = (mesh.corner(f, 1) - mesh.corner(f, 0)).cross(mesh.corner(f, 2) - mesh.corner(f, 0)).normalized();
    if (!(n.dot(up_axis()) >= cos_limit)) return false;
    const Ray up{mesh.face_centroid(f), up_axis()};
    return !scene.occluded(up, params.clearance_min);
}

std::vector<Vec3> sample_support_points(const Bvh& scene, const TriangleMesh& mesh,
                                        std::span<const uint32_t> region_faces, int count,
                                        uint64_t seed, const SupportParams& params) {
    if (region_faces.empty()) throw Error(ErrorKind::PreconditionFailed, "support region is empty");
    if (count < 0) throw Error(ErrorKind::PreconditionFailed, "negative support sample count");
    std::vector<uint32_t> ok;
    for (uint32_t f : region_faces) {
        if (f >= mesh.face_count())
            throw Error(ErrorKind::OutOfBounds, "support face " + std::to_string(f) + " out of range");
        if (is_support_face(scene, mesh, f, params)) ok.push_back(f);
    }
    if (ok.empty())
        throw Error(ErrorKind::NoFlatSupport,
                    "no face within " + std::to_string(params.flatness_deg) +
                        " degrees of horizontal has the required clearance");
    SeedStream rng(seed);
    for (size_t i = ok.size(); i > 1; --i) std::swap(ok[i - 1], ok[rng.index(i)]);
    std::vector<Vec3> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) out.push_back(mesh.face_centroid(ok[i % ok.size()]));
    return out;
}

}  // namespace vfx
