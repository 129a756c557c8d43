#pragma once

// Independent reference computations used by unit and acceptance tests. They
// deliberately avoid the acceleration structures they check.

#include "vfx/core/image.hpp"
#include "vfx/scene/camera.hpp"
#include "vfx/scene/mesh.hpp"

#include <optional>

namespace oracle {

using vfx::Vec3;

struct BruteHit {
    uint32_t face;
    double t;
};

/// Exhaustive Möller–Trumbore over every face; nearest t > 1e-6, ties to the smaller face.
std::optional<BruteHit> intersect_all_faces(const vfx::TriangleMesh& mesh, const vfx::Ray& ray);

/// Per-pixel camera-z depth by exhaustive intersection.
vfx::FloatImage depth_all_faces(const vfx::TriangleMesh& mesh, const vfx::CameraView& cam);

/// Signed volume by the divergence theorem over triangle prisms to the z=0 plane
/// (a different decomposition than the tetrahedron fan used in the library).
double prism_volume(const vfx::TriangleMesh& mesh);

/// Piece membership by ray parity (odd crossings of a +x ray).
bool inside_by_parity(const vfx::TriangleMesh& mesh, const Vec3& p);

}  // namespace oracle
