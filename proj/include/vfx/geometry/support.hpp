#pragma once

#include "vfx/geometry/bvh.hpp"

#include <span>
#include <vector>

namespace vfx {

struct SupportParams {
    double flatness_deg = 10.0;  // max tilt of a supporting face from horizontal
    double clearance_min = 0.5;  // free space required straight above the face center, m
};

/// True when face `f` of `mesh` passes both the flatness and the clearance test
/// (clearance rays are cast against `scene`).
bool is_support_face(const Bvh& scene, const TriangleMesh& mesh, uint32_t f,
                     const SupportParams& params = {});

/// Face centers of qualifying faces within `region_faces`. Faces are drawn
/// without replacement from a seeded shuffle and reused cyclically only when
/// `count` exceeds the number of qualifying faces. Throws NoFlatSupport.
std::vector<Vec3> sample_support_points(const Bvh& scene, const TriangleMesh& mesh,
                                        std::span<const uint32_t> region_faces, int count,
                                        uint64_t seed, const SupportParams& params = {});

}  // namespace vfx
