#pragma once

#include "vfx/scene/mesh.hpp"

#include <span>
#include <vector>

namespace vfx {

/// Hull faces as triples of indices into `points`, outward-facing (CCW seen
/// from outside). Throws Degenerate for fewer than 4 points or a flat set.
std::vector<Face> convex_hull_faces(std::span<const Vec3> points);

/// Hull as a standalone mesh holding only the hull vertices, in input order.
TriangleMesh convex_hull(std::span<const Vec3> points);

/// Every vertex lies on the inner side of every face plane within `tol` (relative to size).
bool is_convex(const TriangleMesh& mesh, double tol = 1e-9);

}  // namespace vfx
