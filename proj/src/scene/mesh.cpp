#include "vfx/scene/mesh.hpp"

#include "vfx/core/error.hpp"

#include <map>
#include <string>
#include <unordered_map>

namespace vfx {

Aabb TriangleMesh::bounds() const {
    Aabb b;
    for (const Vec3& v : vertices) b.extend(v);
    return b;
}

Vec3 TriangleMesh::mean_color() const {
    if (vertex_colors.empty()) return Vec3::Constant(0.8);
    Vec3 sum = Vec3::Zero();
    for (const Vec3& c : vertex_colors) sum += c;
    return sum / static_cast<double>(vertex_colors.size());
}

void TriangleMesh::recompute_normals() {
    face_normals.resize(faces.size());
    for (size_t f = 0; f < faces.size(); ++f) {
        const Vec3 n = (corner(f, 1) - corner(f, 0)).cross(corner(f, 2) - corner(f, 0));
        const double len = n.norm();
        face_normals[f] = len > 0 ? Vec3(n / len) : Vec3::UnitZ();
    }
}

void validate_mesh(const TriangleMesh& mesh, std::string_view what) {
    const auto fail = [&](const std::string& msg) {
        throw Error(ErrorKind::InvariantViolation, std::string(what) + ": " + msg);
    };
    if (mesh.face_normals.size() != mesh.faces.size()) fail("face normal count mismatch");
    if (mesh.has_colors() && mesh.vertex_colors.size() != mesh.vertices.size())
        fail("vertex color count mismatch");
    for (size_t f = 0; f < mesh.faces.size(); ++f) {
        for (uint32_t idx : mesh.faces[f])
            if (idx >= mesh.vertices.size())
                fail("face " + std::to_string(f) + " references vertex " + std::to_string(idx));
        if (std::abs(mesh.face_normals[f].norm() - 1.0) > 1e-6)
            fail("face " + std::to_string(f) + " normal is not unit length");
        if (!(mesh.face_area(f) > 1e-12)) fail("face " + std::to_string(f) + " is degenerate");
    }
    for (size_t v = 0; v < mesh.vertices.size(); ++v)
        if (!mesh.vertices[v].allFinite()) fail("vertex " + std::to_string(v) + " is not finite");
}

TriangleMesh transformed(const TriangleMesh& mesh, const Similarity& xf) {
    TriangleMesh out = mesh;
    for (Vec3& v : out.vertices) v = xf.apply(v);
    for (Vec3& n : out.face_normals) n = xf.rotation * n;
    return out;
}

TriangleMesh merge_meshes(std::span<const TriangleMesh> parts) {
    TriangleMesh out;
    bool colors = !parts.empty();
    for (const TriangleMesh& p : parts) colors = colors && p.has_colors();
    for (const TriangleMesh& p : parts) {
        const auto base = static_cast<uint32_t>(out.vertices.size());
        out.vertices.insert(out.vertices.end(), p.vertices.begin(), p.vertices.end());
        if (colors)
            out.vertex_colors.insert(out.vertex_colors.end(), p.vertex_colors.begin(),
                                     p.vertex_colors.end());
        for (const Face& f : p.faces) out.faces.push_back({f[0] + base, f[1] + base, f[2] + base});
        out.face_normals.insert(out.face_normals.end(), p.face_normals.begin(),
                                p.face_normals.end());
    }
    return out;
}

TriangleMesh extract_faces(const TriangleMesh& mesh, std::span<const uint32_t> faces) {
    TriangleMesh out;
    std::unordered_map<uint32_t, uint32_t> remap;
    for (uint32_t f : faces) {
        Face nf{};
        for (int k = 0; k < 3; ++k) {
            const uint32_t v = mesh.faces[f][k];
            auto [it, inserted] = remap.emplace(v, static_cast<uint32_t>(out.vertices.size()));
            if (inserted) {
                out.vertices.push_back(mesh.vertices[v]);
                if (mesh.has_colors()) out.vertex_colors.push_back(mesh.vertex_colors[v]);
            }
            nf[k] = it->second;
        }
        out.faces.push_back(nf);
        out.face_normals.push_back(mesh.face_normals[f]);
    }
    return out;
}

bool is_watertight(const TriangleMesh& mesh) {
    if (mesh.faces.empty()) return false;
    std::map<std::pair<uint32_t, uint32_t>, int> directed;
    for (const Face& f : mesh.faces)
        for (int k = 0; k < 3; ++k) ++directed[{f[k], f[(k + 1) % 3]}];
    for (const auto& [edge, count] : directed) {
        if (count != 1) return false;
        auto it = directed.find({edge.second, edge.first});
        if (it == directed.end() || it->second != 1) return false;
    }
    return true;
}

TriangleMesh make_box(const Vec3& lo, const Vec3& hi) {
    TriangleMesh m;
    for (int i = 0; i < 8; ++i)
        m.vertices.emplace_back(i & 1 ? hi.x() : lo.x(), i & 2 ? hi.y() : lo.y(),
                                i & 4 ? hi.z() : lo.z());
    // Outward counter-clockwise quads.
    const int quads[6][4] = {{0, 2, 3, 1}, {4, 5, 7, 6}, {0, 1, 5, 4},
                             {2, 6, 7, 3}, {0, 4, 6, 2}, {1, 3, 7, 5}};
    for (const auto& q : quads) {
        m.faces.push_back({uint32_t(q[0]), uint32_t(q[1]), uint32_t(q[2])});
        m.faces.push_back({uint32_t(q[0]), uint32_t(q[2]), uint32_t(q[3])});
    }
    m.recompute_normals();
    return m;
}

TriangleMesh make_grid_plane(const Vec2& lo, const Vec2& hi, double z, int nx, int ny) {
    TriangleMesh m;
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            m.vertices.emplace_back(lo.x() + (hi.x() - lo.x()) * i / nx,
                                    lo.y() + (hi.y() - lo.y()) * j / ny, z);
    const auto id = [nx](int i, int j) { return static_cast<uint32_t>(j * (nx + 1) + i); };
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            m.faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            m.faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    m.recompute_normals();
    return m;
}

TriangleMesh make_icosphere(double radius, int subdivisions) {
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vec3> v = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0},
                           {0, -1, t}, {0, 1, t}, {0, -1, -t}, {0, 1, -t},
                           {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
    for (Vec3& p : v) p.normalize();
    std::vector<Face> f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                           {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                           {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                           {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
    for (int s = 0; s < subdivisions; ++s) {
        std::map<std::pair<uint32_t, uint32_t>, uint32_t> mid;
        const auto midpoint = [&](uint32_t a, uint32_t b) {
            const auto key = std::minmax(a, b);
            auto it = mid.find(key);
            if (it != mid.end()) return it->second;
            v.push_back((v[a] + v[b]).normalized());
            const auto idx = static_cast<uint32_t>(v.size() - 1);
            mid.emplace(key, idx);
            return idx;
        };
        std::vector<Face> next;
        for (const Face& tri : f) {
            const uint32_t a = midpoint(tri[0], tri[1]);
            const uint32_t b = midpoint(tri[1], tri[2]);
            const uint32_t c = midpoint(tri[2], tri[0]);
            next.push_back({tri[0], a, c});
            next.push_back({tri[1], b, a});
            next.push_back({tri[2], c, b});
            next.push_back({a, b, c});
        }
        f = std::move(next);
    }
    TriangleMesh m;
    for (const Vec3& p : v) m.vertices.push_back(radius * p);
    m.faces = std::move(f);
    m.recompute_normals();
    return m;
}

TriangleMesh make_uv_sphere(double radius, int rings, int segments) {
    TriangleMesh m;
    m.vertices.emplace_back(0, 0, -radius);  // south pole first
    for (int r = 1; r < rings; ++r) {
        const double theta = kPi * r / rings;  // from the south pole
        for (int s = 0; s < segments; ++s) {
            const double phi = 2.0 * kPi * s / segments;
            m.vertices.emplace_back(radius * std::sin(theta) * std::cos(phi),
                                    radius * std::sin(theta) * std::sin(phi),
                                    -radius * std::cos(theta));
        }
    }
    m.vertices.emplace_back(0, 0, radius);
    const auto north = static_cast<uint32_t>(m.vertices.size() - 1);
    const auto ring = [segments](int r, int s) {
        return static_cast<uint32_t>(1 + (r - 1) * segments + (s % segments));
    };
    for (int s = 0; s < segments; ++s) m.faces.push_back({0, ring(1, s + 1), ring(1, s)});
    for (int r = 1; r < rings - 1; ++r)
        for (int s = 0; s < segments; ++s) {
            m.faces.push_back({ring(r, s), ring(r, s + 1), ring(r + 1, s + 1)});
            m.faces.push_back({ring(r, s), ring(r + 1, s + 1), ring(r + 1, s)});
        }
    for (int s = 0; s < segments; ++s)
        m.faces.push_back({ring(rings - 1, s), ring(rings - 1, s + 1), north});
    m.recompute_normals();
    return m;
}

}  // namespace vfx
