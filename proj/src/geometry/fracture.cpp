#include "vfx/geometry/fracture.hpp"

#include "vfx/core/error.hpp"
#include "vfx/core/rng.hpp"
#include "vfx/geometry/hull.hpp"

#include <map>
#include <numeric>
#include <tuple>

namespace vfx {
namespace {

struct PolyVertex {
    Vec3 p;
    Vec3 c;
};

struct Polygon {
    std::vector<PolyVertex> v;
    bool cut = false;  // produced by a Voronoi plane (interior surface)
};

using Polyhedron = std::vector<Polygon>;

bool lex_less(const Vec3& a, const Vec3& b) {
    return std::tie(a.x(), a.y(), a.z()) < std::tie(b.x(), b.y(), b.z());
}

// Edge/plane intersection evaluated from a canonical endpoint order so that the
// two polygons sharing an edge produce bit-identical points.
PolyVertex split_edge(const PolyVertex& a, const PolyVertex& b, const Vec3& n, double d) {
    const PolyVertex& lo = lex_less(a.p, b.p) ? a : b;
    const PolyVertex& hi = lex_less(a.p, b.p) ? b : a;
    const double dl = n.dot(lo.p) - d;
    const double dh = n.dot(hi.p) - d;
    const double t = dl / (dl - dh);
    return {lo.p + t * (hi.p - lo.p), lo.c + t * (hi.c - lo.c)};
}

Polyhedron clip(const Polyhedron& in, const Vec3& n, double d) {
    double lo = kInf, hi = -kInf;
    for (const auto& poly : in)
        for (const auto& v : poly.v) {
            const double s = n.dot(v.p) - d;
            lo = std::min(lo, s);
            hi = std::max(hi, s);
        }
    if (hi <= 0) return in;
    if (lo > 0) return {};

    Polyhedron out;
    std::vector<PolyVertex> cap;
    for (const auto& poly : in) {
        Polygon res;
        res.cut = poly.cut;
        const size_t m = poly.v.size();
        for (size_t i = 0; i < m; ++i) {
            const PolyVertex& a = poly.v[i];
            const PolyVertex& b = poly.v[(i + 1) % m];
            const double da = n.dot(a.p) - d;
            const double db = n.dot(b.p) - d;
            if (da <= 0) {
                res.v.push_back(a);
                if (da == 0) cap.push_back(a);
                if (db > 0 && da < 0) {
                    res.v.push_back(split_edge(a, b, n, d));
                    cap.push_back(res.v.back());
                }
            } else if (db < 0) {
                res.v.push_back(split_edge(a, b, n, d));
                cap.push_back(res.v.back());
            }
        }
        if (res.v.size() >= 3) out.push_back(std::move(res));
    }

    // Cap polygon: unique on-plane points ordered counter-clockwise about +n.
    std::vector<PolyVertex> uniq;
    for (const auto& c : cap) {
        bool seen = false;
        for (const auto& u : uniq)
            if (u.p == c.p) {
                seen = true;
                break;
            }
        if (!seen) uniq.push_back(c);
    }
    if (uniq.size() >= 3) {
        Vec3 center = Vec3::Zero();
        for (const auto& u : uniq) center += u.p;
        center /= static_cast<double>(uniq.size());
        Vec3 t, b;
        make_basis(n.normalized(), t, b);
        std::vector<std::pair<double, size_t>> order;
        for (size_t i = 0; i < uniq.size(); ++i) {
            const Vec3 r = uniq[i].p - center;
            order.emplace_back(std::atan2(r.dot(b), r.dot(t)), i);
        }
        std::sort(order.begin(), order.end());
        Polygon capped;
        capped.cut = true;
        for (auto [angle, i] : order) capped.v.push_back(uniq[i]);
        Vec3 newell = Vec3::Zero();
        for (size_t i = 0; i < capped.v.size(); ++i)
            newell += capped.v[i].p.cross(capped.v[(i + 1) % capped.v.size()].p);
        if (newell.dot(n) < 0) std::reverse(capped.v.begin(), capped.v.end());
        if (newell.norm() > 0) out.push_back(std::move(capped));
    }
    return out;
}

TriangleMesh to_mesh(const Polyhedron& poly, const Vec3& interior_color, bool colored) {
    TriangleMesh mesh;
    std::map<std::tuple<double, double, double>, uint32_t> index;
    const auto vertex = [&](const PolyVertex& v) {
        const auto key = std::make_tuple(v.p.x(), v.p.y(), v.p.z());
        auto it = index.find(key);
        if (it != index.end()) return it->second;
        const auto id = static_cast<uint32_t>(mesh.vertices.size());
        mesh.vertices.push_back(v.p);
        mesh.vertex_colors.push_back(v.c);
        index.emplace(key, id);
        return id;
    };
    for (const auto& p : poly) {
        std::vector<uint32_t> ring;
        for (const auto& v : p.v) {
            const uint32_t id = vertex(v);
            if (ring.empty() || ring.back() != id) ring.push_back(id);
        }
        while (ring.size() > 1 && ring.front() == ring.back()) ring.pop_back();
        if (ring.size() < 3) continue;
        Vec3 center = Vec3::Zero(), color = Vec3::Zero();
        for (uint32_t id : ring) {
            center += mesh.vertices[id];
            color += mesh.vertex_colors[id];
        }
        center /= static_cast<double>(ring.size());
        color /= static_cast<double>(ring.size());
        const auto c = static_cast<uint32_t>(mesh.vertices.size());
        mesh.vertices.push_back(center);
        mesh.vertex_colors.push_back(p.cut ? interior_color : color);
        for (size_t i = 0; i < ring.size(); ++i) mesh.faces.push_back({c, ring[i], ring[(i + 1) % ring.size()]});
    }
    if (!colored) mesh.vertex_colors.clear();
    mesh.recompute_normals();
    return mesh;
}

}  // namespace

HalfSpaces face_planes(const TriangleMesh& mesh) {
    HalfSpaces hs;
    for (size_t f = 0; f < mesh.face_count(); ++f) {
        Vec3 n = (mesh.corner(f, 1) - mesh.corner(f, 0)).cross(mesh.corner(f, 2) - mesh.corner(f, 0));
        const double len = n.norm();
        if (len == 0) continue;
        n /= len;
        hs.normals.push_back(n);
        hs.offsets.push_back(n.dot(mesh.corner(f, 0)));
    }
    return hs;
}

FractureResult voronoi_fracture(const TriangleMesh& input, std::span<const Vec3> sites) {
    if (sites.size() < 2)
        throw Error(ErrorKind::Degenerate, "fracture needs at least 2 cells, got " + std::to_string(sites.size()));
    if (input.empty()) throw Error(ErrorKind::EmptyMesh, "cannot fracture an empty mesh");

    FractureResult result;
    result.sites.assign(sites.begin(), sites.end());
    TriangleMesh mesh = input;
    const bool colored = input.has_colors();
    if (!is_watertight(mesh) || !is_convex(mesh)) {
        const auto faces = convex_hull_faces(input.vertices);
        mesh.faces = faces;
        mesh.recompute_normals();
        result.used_hull = true;
    }
    const Vec3 interior = input.mean_color();

    Polyhedron base;
    for (size_t f = 0; f < mesh.face_count(); ++f) {
        Polygon p;
        for (int k = 0; k < 3; ++k) {
            const uint32_t vi = mesh.faces[f][k];
            p.v.push_back({mesh.vertices[vi], colored ? input.vertex_colors[vi] : interior});
        }
        base.push_back(std::move(p));
    }

    for (size_t i = 0; i < sites.size(); ++i) {
        const Vec3& si = sites[i];
        std::vector<size_t> others;
        for (size_t j = 0; j < sites.size(); ++j)
            if (j != i && sites[j] != si) others.push_back(j);
        std::stable_sort(others.begin(), others.end(), [&](size_t a, size_t b) {
            return (sites[a] - si).squaredNorm() < (sites[b] - si).squaredNorm();
        });
        Polyhedron cell = base;
        for (size_t j : others) {
            double radius2 = 0;
            for (const auto& poly : cell)
                for (const auto& v : poly.v) radius2 = std::max(radius2, (v.p - si).squaredNorm());
            // Bisector lies further than every vertex: this and all later planes miss the cell.
            if (0.25 * (sites[j] - si).squaredNorm() > radius2) break;
            const Vec3 n = sites[j] - si;
            const double d = 0.5 * (sites[j].squaredNorm() - si.squaredNorm());
            cell = clip(cell, n, d);
            if (cell.empty()) break;
        }
        if (cell.empty()) continue;
        TriangleMesh piece = to_mesh(cell, interior, colored);
        if (piece.empty()) continue;
        result.pieces.push_back(std::move(piece));
        result.piece_site.push_back(i);
    }
    if (result.pieces.empty()) throw Error(ErrorKind::Degenerate, "fracture produced no pieces");
    return result;
}

FractureResult voronoi_fracture(const TriangleMesh& mesh, int cell_count, uint64_t seed) {
    if (cell_count < 2)
        throw Error(ErrorKind::Degenerate, "fracture needs at least 2 cells, got " + std::to_string(cell_count));
    const Aabb box = mesh.bounds();
    SeedStream rng(seed);
    std::vector<Vec3> sites(cell_count);
    for (auto& s : sites)
        for (int a = 0; a < 3; ++a) s[a] = rng.uniform(box.lo[a], box.hi[a]);
    return voronoi_fracture(mesh, sites);
}

}  // namespace vfx
