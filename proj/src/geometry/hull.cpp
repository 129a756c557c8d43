#include "vfx/geometry/hull.hpp"

#include "vfx/core/error.hpp"

#include <unordered_map>

namespace vfx {
namespace {

struct HullFace {
    std::array<uint32_t, 3> v;
    Vec3 n;
    double d;
    bool alive = true;
};

uint64_t edge_key(uint32_t a, uint32_t b) { return (uint64_t(a) << 32) | b; }

HullFace make_face(std::span<const Vec3> pts, uint32_t a, uint32_t b, uint32_t c) {
    HullFace f;
    f.v = {a, b, c};
    f.n = (pts[b] - pts[a]).cross(pts[c] - pts[a]);
    const double len = f.n.norm();
    if (len > 0) f.n /= len;
    f.d = f.n.dot(pts[a]);
    return f;
}

}  // namespace

std::vector<Face> convex_hull_faces(std::span<const Vec3> pts) {
    const auto n = static_cast<uint32_t>(pts.size());
    if (n < 4) throw Error(ErrorKind::Degenerate, "convex hull needs at least 4 points, got " + std::to_string(n));
    Aabb box;
    for (const auto& p : pts) box.extend(p);
    const double scale = std::max(box.extent().norm(), 1e-300);
    const double eps = 1e-11 * scale;

    uint32_t i0 = 0;
    for (uint32_t i = 1; i < n; ++i)
        if (pts[i].x() < pts[i0].x()) i0 = i;
    uint32_t i1 = i0;
    double best = 0;
    for (uint32_t i = 0; i < n; ++i) {
        const double d = (pts[i] - pts[i0]).norm();
        if (d > best) best = d, i1 = i;
    }
    if (best <= eps) throw Error(ErrorKind::Degenerate, "all hull points coincide");
    const Vec3 axis = (pts[i1] - pts[i0]).normalized();
    uint32_t i2 = i0;
    best = 0;
    for (uint32_t i = 0; i < n; ++i) {
        const Vec3 r = pts[i] - pts[i0];
        const double d = (r - r.dot(axis) * axis).norm();
        if (d > best) best = d, i2 = i;
    }
    if (best <= eps) throw Error(ErrorKind::Degenerate, "hull points are collinear");
    const Vec3 pn = (pts[i1] - pts[i0]).cross(pts[i2] - pts[i0]).normalized();
    uint32_t i3 = i0;
    best = 0;
    for (uint32_t i = 0; i < n; ++i) {
        const double d = std::abs(pn.dot(pts[i] - pts[i0]));
        if (d > best) best = d, i3 = i;
    }
    if (best <= eps) throw Error(ErrorKind::Degenerate, "hull points are coplanar");

    std::vector<HullFace> faces;
    std::unordered_map<uint64_t, uint32_t> edges;
    const auto add_face = [&](uint32_t a, uint32_t b, uint32_t c) {
        const auto id = static_cast<uint32_t>(faces.size());
        faces.push_back(make_face(pts, a, b, c));
        edges[edge_key(a, b)] = id;
        edges[edge_key(b, c)] = id;
        edges[edge_key(c, a)] = id;
    };
    const Vec3 centroid = (pts[i0] + pts[i1] + pts[i2] + pts[i3]) / 4.0;
    const std::array<std::array<uint32_t, 3>, 4> tet = {{{i0, i1, i2}, {i0, i3, i1}, {i1, i3, i2}, {i0, i2, i3}}};
    for (auto t : tet) {
        const HullFace f = make_face(pts, t[0], t[1], t[2]);
        if (f.n.dot(centroid) - f.d > 0) std::swap(t[1], t[2]);
        add_face(t[0], t[1], t[2]);
    }

    std::vector<char> visible;
    std::vector<std::pair<uint32_t, uint32_t>> horizon;
    for (uint32_t p = 0; p < n; ++p) {
        if (p == i0 || p == i1 || p == i2 || p == i3) continue;
        visible.assign(faces.size(), 0);
        bool any = false;
        for (size_t f = 0; f < faces.size(); ++f) {
            if (faces[f].alive && faces[f].n.dot(pts[p]) - faces[f].d > eps) {
                visible[f] = 1;
                any = true;
            }
        }
        if (!any) continue;
        horizon.clear();
        for (size_t f = 0; f < faces.size(); ++f) {
            if (!visible[f]) continue;
            const auto& v = faces[f].v;
            for (int k = 0; k < 3; ++k) {
                const uint32_t a = v[k], b = v[(k + 1) % 3];
                const uint32_t twin = edges.at(edge_key(b, a));
                if (!visible[twin]) horizon.emplace_back(a, b);
            }
        }
        for (size_t f = 0; f < faces.size(); ++f) {
            if (!visible[f]) continue;
            faces[f].alive = false;
            const auto& v = faces[f].v;
            for (int k = 0; k < 3; ++k) edges.erase(edge_key(v[k], v[(k + 1) % 3]));
        }
        for (auto [a, b] : horizon) add_face(a, b, p);
    }

    std::vector<Face> out;
    for (const auto& f : faces)
        if (f.alive) out.push_back(f.v);
    return out;
}

TriangleMesh convex_hull(std::span<const Vec3> points) {
    const auto faces = convex_hull_faces(points);
    std::vector<int64_t> remap(points.size(), -1);
    for (const auto& f : faces)
        for (uint32_t v : f) remap[v] = 0;
    TriangleMesh mesh;
    for (size_t i = 0; i < points.size(); ++i) {
        if (remap[i] < 0) continue;
        remap[i] = static_cast<int64_t>(mesh.vertices.size());
        mesh.vertices.push_back(points[i]);
    }
    mesh.faces.reserve(faces.size());
    for (const auto& f : faces)
        mesh.faces.push_back({static_cast<uint32_t>(remap[f[0]]), static_cast<uint32_t>(remap[f[1]]),
                              static_cast<uint32_t>(remap[f[2]])});
    mesh.recompute_normals();
    return mesh;
}

bool is_convex(const TriangleMesh& mesh, double tol) {
    if (mesh.empty()) return false;
    const double scale = mesh.bounds().extent().norm();
    for (size_t f = 0; f < mesh.face_count(); ++f) {
        Vec3 n = (mesh.corner(f, 1) - mesh.corner(f, 0)).cross(mesh.corner(f, 2) - mesh.corner(f, 0));
        const double len = n.norm();
        if (len == 0) continue;
        n /= len;
        const double d = n.dot(mesh.corner(f, 0));
        for (const auto& v : mesh.vertices)
            if (n.dot(v) - d > tol * scale) return false;
    }
    return true;
}

}  // namespace vfx
