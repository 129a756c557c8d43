#pragma once

#include "vfx/core/exec.hpp"
#include "vfx/core/image.hpp"
#include "vfx/core/math.hpp"
#include "vfx/scene/camera.hpp"
#include "vfx/scene/mesh.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace vfx {

/// Self-intersection epsilon for ray queries, meters.
inline constexpr double kRayEpsilon = 1e-6;

struct Hit {
    uint32_t face = 0;
    double t = kInf;
    Vec2 barycentrics = Vec2::Zero();  // weights of corners 1 and 2
};

struct ClosestPoint {
    uint32_t face = 0;
    Vec3 point = Vec3::Zero();
    double distance = kInf;
};

/// Möller–Trumbore. Direction need not be unit length; t is in ray parameter units.
std::optional<Hit> intersect_triangle(const Vec3& a, const Vec3& b, const Vec3& c, const Ray& ray,
                                      double t_min);

/// Closest point on triangle abc to p (Ericson, Real-Time Collision Detection 5.1.5).
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

/// Binned-SAH bounding volume hierarchy over the faces of a mesh. The mesh
/// is copied so the tree owns everything it needs.
class Bvh {
public:
    struct Node {
        Aabb box;
        uint32_t first = 0;  // leaf: first index into face order; inner: right child
        uint32_t count = 0;  // 0 for inner nodes
    };

    explicit Bvh(TriangleMesh mesh);  // throws EmptyMesh

    const TriangleMesh& mesh() const { return mesh_; }
    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<uint32_t>& face_order() const { return order_; }
    const Aabb& bounds() const { return nodes_.front().box; }

    /// Nearest hit with t > kRayEpsilon; ties on t go to the smaller face index.
    std::optional<Hit> intersect(const Ray& ray, double t_max = kInf) const;
    bool occluded(const Ray& ray, double t_max) const;
    std::optional<ClosestPoint> closest_point(const Vec3& p, double max_distance = kInf) const;

private:
    uint32_t build(uint32_t begin, uint32_t end, std::vector<Aabb>& boxes,
                   std::vector<Vec3>& centroids);

    TriangleMesh mesh_;
    std::vector<Node> nodes_;
    std::vector<uint32_t> order_;
};

/// Per-pixel camera-frame depth of the nearest surface; +inf where nothing is hit.
FloatImage render_depth_map(const Bvh& bvh, const CameraView& cam, Exec exec = Exec::parallel);

/// Per-pixel first-hit face index (or -1).
Image<int64_t> render_face_ids(const Bvh& bvh, const CameraView& cam, Exec exec = Exec::parallel);

}  // namespace vfx
