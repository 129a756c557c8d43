#pragma once

#include "vfx/scene/mesh.hpp"

#include <span>
#include <vector>

namespace vfx {

struct PatchResult {
    TriangleMesh mesh;
    std::vector<int64_t> face_origin;  // input face index per output face, -1 for patch faces
    size_t patch_face_count = 0;
    Vec3 plane_normal = Vec3::UnitZ();  // least-squares plane of the hole boundary
    Vec3 plane_point = Vec3::Zero();
};

/// Deletes `removed_faces` and closes the hole they leave with an ear-clipped
/// fan over the boundary loop, triangulated in the loop's least-squares plane.
/// Only edges newly exposed by the removal count as hole boundary, so meshes
/// with pre-existing open borders are handled; a removal that exposes no edge
/// (a disconnected component) is simply deleted. Errors: MultipleLoops, OpenBoundary.
PatchResult plane_patch_hole(const TriangleMesh& mesh, std::span<const uint32_t> removed_faces);

}  // namespace vfx
