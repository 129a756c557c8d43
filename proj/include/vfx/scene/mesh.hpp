#pragma once

#include "vfx/core/math.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace vfx {

using Face = std::array<uint32_t, 3>;

/// Indexed triangle mesh in meters. Normals are per face; colors optional per vertex.
struct TriangleMesh {
    std::vector<Vec3> vertices;
    std::vector<Face> faces;
    std::vector<Vec3> face_normals;
    std::vector<Vec3> vertex_colors;  // empty, or one linear RGB per vertex

    size_t face_count() const { return faces.size(); }
    bool empty() const { return faces.empty(); }
    bool has_colors() const { return !vertex_colors.empty(); }

    const Vec3& corner(size_t face, int k) const { return vertices[faces[face][k]]; }
    Vec3 face_centroid(size_t face) const {
        return (corner(face, 0) + corner(face, 1) + corner(face, 2)) / 3.0;
    }
    double face_area(size_t face) const {
        return 0.5 * (corner(face, 1) - corner(face, 0)).cross(corner(face, 2) - corner(face, 0)).norm();
    }
    Aabb bounds() const;
    Vec3 mean_color() const;

    void recompute_normals();
};

/// Throws InvariantViolation naming `what` and the offending record.
void validate_mesh(const TriangleMesh& mesh, std::string_view what);

/// Applies a similarity to vertices and normals.
TriangleMesh transformed(const TriangleMesh& mesh, const Similarity& xf);

/// Concatenates meshes; colors are kept only if every part has them.
TriangleMesh merge_meshes(std::span<const TriangleMesh> parts);

/// Subset of faces, re-indexed to only the vertices they reference.
TriangleMesh extract_faces(const TriangleMesh& mesh, std::span<const uint32_t> faces);

/// Every undirected edge is used by exactly two faces with opposite orientation.
bool is_watertight(const TriangleMesh& mesh);

// Builders used by tests, demos and the physics proxies.
TriangleMesh make_box(const Vec3& lo, const Vec3& hi);
// Horizontal rectangle at height z, normals +z, split into nx*ny cells.
TriangleMesh make_grid_plane(const Vec2& lo, const Vec2& hi, double z, int nx, int ny);
TriangleMesh make_icosphere(double radius, int subdivisions);
TriangleMesh make_uv_sphere(double radius, int rings, int segments);

}  // namespace vfx
