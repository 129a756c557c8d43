#pragma once

#include "vfx/scene/mesh.hpp"

#include <span>
#include <vector>

namespace vfx {

inline constexpr int kDefaultFractureCount = 100;

struct FractureResult {
    std::vector<TriangleMesh> pieces;  // non-empty cells only, in site order
    std::vector<Vec3> sites;
    std::vector<size_t> piece_site;    // site index of each piece
    bool used_hull = false;            // input was not convex and its hull was cut instead
};

/// Voronoi cells of `cell_count` sites drawn uniformly in the bounding box,
/// each clipped against the (convex) mesh. Throws Degenerate for cell_count < 2.
FractureResult voronoi_fracture(const TriangleMesh& mesh, int cell_count = kDefaultFractureCount,
                                uint64_t seed = 0);

/// Same with caller-chosen sites.
FractureResult voronoi_fracture(const TriangleMesh& mesh, std::span<const Vec3> sites);

/// A convex polyhedron as outward planes n.x <= d, used for point-membership tests.
struct HalfSpaces {
    std::vector<Vec3> normals;
    std::vector<double> offsets;

    bool contains(const Vec3& p, double tol = 0.0) const {
        for (size_t i = 0; i < normals.size(); ++i)
            if (normals[i].dot(p) - offsets[i] > tol) return false;
        return true;
    }
};
HalfSpaces face_planes(const TriangleMesh& convex_mesh);

}  // namespace vfx
