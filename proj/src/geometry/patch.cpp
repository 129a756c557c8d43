#include "vfx/geometry/patch.hpp"

#include "vfx/core/error.hpp"

#include <map>
#include <unordered_map>

namespace vfx {
namespace {

uint64_t edge_key(uint32_t a, uint32_t b) { return (uint64_t(a) << 32) | b; }

double cross2(const Vec2& a, const Vec2& b, const Vec2& c) {
    return (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
}

bool inside_triangle(const Vec2& p, const Vec2& a, const Vec2& b, const Vec2& c) {
    return cross2(a, b, p) >= 0 && cross2(b, c, p) >= 0 && cross2(c, a, p) >= 0;
}

// Ear clipping of a counter-clockwise simple polygon; returns index triples into `ring`.
std::vector<std::array<size_t, 3>> ear_clip(const std::vector<Vec2>& pts) {
    std::vector<size_t> ring(pts.size());
    for (size_t i = 0; i < ring.size(); ++i) ring[i] = i;
    std::vector<std::array<size_t, 3>> tris;
    while (ring.size() > 3) {
        const size_t m = ring.size();
        size_t ear = m;
        for (size_t i = 0; i < m && ear == m; ++i) {
            const size_t a = ring[(i + m - 1) % m], b = ring[i], c = ring[(i + 1) % m];
            if (cross2(pts[a], pts[b], pts[c]) <= 0) continue;
            bool blocked = false;
            for (size_t k : ring) {
                if (k == a || k == b || k == c) continue;
                if (pts[k] == pts[a] || pts[k] == pts[b] || pts[k] == pts[c]) continue;
                if (inside_triangle(pts[k], pts[a], pts[b], pts[c])) {
                    blocked = true;
                    break;
                }
            }
            if (!blocked) ear = i;
        }
        // Numerically flat or self-touching loops: clip the first vertex so the loop still closes.
        if (ear == m) ear = 0;
        tris.push_back({ring[(ear + m - 1) % m], ring[ear], ring[(ear + 1) % m]});
        ring.erase(ring.begin() + static_cast<std::ptrdiff_t>(ear));
    }
    tris.push_back({ring[0], ring[1], ring[2]});
    return tris;
}

}  // namespace

PatchResult plane_patch_hole(const TriangleMesh& mesh, std::span<const uint32_t> removed_faces) {
    std::vector<char> removed(mesh.face_count(), 0);
    for (uint32_t f : removed_faces) {
        if (f >= mesh.face_count())
            throw Error(ErrorKind::OutOfBounds, "removed face " + std::to_string(f) + " out of range");
        removed[f] = 1;
    }
    std::unordered_map<uint64_t, uint32_t> owner;
    for (uint32_t f = 0; f < mesh.face_count(); ++f)
        for (int k = 0; k < 3; ++k) owner[edge_key(mesh.faces[f][k], mesh.faces[f][(k + 1) % 3])] = f;

    // Hole edges keep the orientation they had in the removed faces.
    std::map<uint32_t, uint32_t> next;
    for (uint32_t f = 0; f < mesh.face_count(); ++f) {
        if (removed[f]) continue;
        for (int k = 0; k < 3; ++k) {
            const uint32_t u = mesh.faces[f][k], v = mesh.faces[f][(k + 1) % 3];
            auto it = owner.find(edge_key(v, u));
            if (it == owner.end() || !removed[it->second]) continue;
            if (!next.emplace(v, u).second)
                throw Error(ErrorKind::MultipleLoops, "hole boundary pinches at vertex " + std::to_string(v));
        }
    }

    PatchResult out;
    for (uint32_t f = 0; f < mesh.face_count(); ++f) {
        if (removed[f]) continue;
        out.mesh.faces.push_back(mesh.faces[f]);
        out.face_origin.push_back(f);
    }
    out.mesh.vertices = mesh.vertices;
    out.mesh.vertex_colors = mesh.vertex_colors;
    if (next.empty()) {
        out.mesh.recompute_normals();
        return out;
    }

    std::vector<uint32_t> loop;
    const uint32_t start = next.begin()->first;
    uint32_t cur = start;
    do {
        loop.push_back(cur);
        auto it = next.find(cur);
        if (it == next.end())
            throw Error(ErrorKind::OpenBoundary, "hole boundary ends at vertex " + std::to_string(cur));
        cur = it->second;
        if (loop.size() > next.size())
            throw Error(ErrorKind::OpenBoundary, "hole boundary does not return to its start");
    } while (cur != start);
    if (loop.size() != next.size())
        throw Error(ErrorKind::MultipleLoops, "removal leaves more than one boundary loop");
    if (loop.size() < 3) throw Error(ErrorKind::OpenBoundary, "hole boundary has fewer than 3 vertices");

    Vec3 centroid = Vec3::Zero();
    for (uint32_t v : loop) centroid += mesh.vertices[v];
    centroid /= static_cast<double>(loop.size());
    Mat3 cov = Mat3::Zero();
    Vec3 newell = Vec3::Zero();
    for (size_t i = 0; i < loop.size(); ++i) {
        const Vec3 r = mesh.vertices[loop[i]] - centroid;
        cov += r * r.transpose();
        newell += mesh.vertices[loop[i]].cross(mesh.vertices[loop[(i + 1) % loop.size()]]);
    }
    Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
    Vec3 normal = eig.eigenvectors().col(0).normalized();
    if (normal.dot(newell) < 0) normal = -normal;
    out.plane_normal = normal;
    out.plane_point = centroid;

    Vec3 t, b;
    make_basis(normal, t, b);
    std::vector<Vec2> pts;
    for (uint32_t v : loop) {
        const Vec3 r = mesh.vertices[v] - centroid;
        pts.emplace_back(r.dot(t), r.dot(b));
    }
    for (const auto& tri : ear_clip(pts)) {
        out.mesh.faces.push_back({loop[tri[0]], loop[tri[1]], loop[tri[2]]});
        out.face_origin.push_back(-1);
        ++out.patch_face_count;
    }
    out.mesh.recompute_normals();
    return out;
}

}  // namespace vfx
