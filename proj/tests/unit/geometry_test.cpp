#include <doctest.h>

#include "oracles/geometry_oracles.hpp"
#include "vfx/core/error.hpp"
#include "vfx/core/rng.hpp"
#include "vfx/geometry/bvh.hpp"
#include "vfx/geometry/fracture.hpp"
#include "vfx/geometry/hull.hpp"
#include "vfx/geometry/kdtree.hpp"
#include "vfx/geometry/mass.hpp"
#include "vfx/geometry/patch.hpp"
#include "vfx/geometry/support.hpp"

#include <set>

using namespace vfx;

namespace {

TriangleMesh random_triangles(int n, uint64_t seed) {
    SeedStream rng(seed);
    TriangleMesh m;
    for (int i = 0; i < n; ++i) {
        const Vec3 c(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
        for (int k = 0; k < 3; ++k)
            m.vertices.push_back(c + Vec3(rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2)));
        m.faces.push_back({uint32_t(3 * i), uint32_t(3 * i + 1), uint32_t(3 * i + 2)});
    }
    m.recompute_normals();
    return m;
}

Ray random_ray(SeedStream& rng) {
    const Vec3 o(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2));
    const Vec3 target(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    return {o, (target - o).normalized()};
}

CameraView identity_camera(int w, int h, double f) {
    CameraView cam;
    cam.intrinsics = {f, f, w / 2.0, h / 2.0, w, h};
    return cam;
}

TriangleMesh tilted_plane(double degrees) {
    TriangleMesh m = make_grid_plane(Vec2(-1, -1), Vec2(1, 1), 0.0, 2, 2);
    const Quat q(Eigen::AngleAxisd(degrees * kPi / 180.0, Vec3::UnitX()));
    Similarity s;
    s.rotation = q;
    return transformed(m, s);
}

}  // namespace

TEST_CASE("bvh root box equals the cube bounds") {
    const auto cube = make_box(Vec3(0, 0, 0), Vec3(1, 2, 3));
    CHECK(cube.face_count() == 12);
    Bvh bvh(cube);
    CHECK(bvh.bounds().lo == Vec3(0, 0, 0));
    CHECK(bvh.bounds().hi == Vec3(1, 2, 3));
}

TEST_CASE("bvh of an empty mesh throws EmptyMesh") {
    try {
        Bvh bvh{TriangleMesh{}};
        FAIL("expected EmptyMesh");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::EmptyMesh);
    }
}

TEST_CASE("bvh structure: every face in exactly one leaf, parents contain children") {
    Bvh bvh(random_triangles(1000, 3));
    std::vector<int> seen(1000, 0);
    const auto& nodes = bvh.nodes();
    for (size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].count > 0) {
            for (uint32_t k = nodes[i].first; k < nodes[i].first + nodes[i].count; ++k) ++seen[bvh.face_order()[k]];
        } else {
            for (uint32_t child : {uint32_t(i + 1), nodes[i].first}) {
                CHECK((nodes[i].box.lo.array() <= nodes[child].box.lo.array()).all());
                CHECK((nodes[i].box.hi.array() >= nodes[child].box.hi.array()).all());
            }
        }
    }
    for (int s : seen) CHECK(s == 1);
}

TEST_CASE("ray through a unit triangle at z=0 hits at t=1") {
    TriangleMesh m;
    m.vertices = {Vec3(-1, -1, 0), Vec3(1, -1, 0), Vec3(0, 1, 0)};
    m.faces = {{0, 1, 2}};
    m.recompute_normals();
    Bvh bvh(m);
    auto hit = bvh.intersect({Vec3(0, 0, -1), Vec3(0, 0, 1)});
    REQUIRE(hit);
    CHECK(hit->t == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_FALSE(bvh.intersect({Vec3(0, 0, -1), Vec3(1, 0, 0)}));
}

TEST_CASE("bvh matches the brute-force oracle on 10k random triangles") {
    const auto mesh = random_triangles(10000, 11);
    Bvh bvh(mesh);
    SeedStream rng(5);
    for (int i = 0; i < 1000; ++i) {
        const Ray r = random_ray(rng);
        const auto a = bvh.intersect(r);
        const auto b = oracle::intersect_all_faces(mesh, r);
        REQUIRE(a.has_value() == b.has_value());
        if (a) {
            CHECK(a->face == b->face);
            CHECK(a->t == b->t);
        }
    }
}

TEST_CASE("closest point agrees with a scan over faces") {
    const auto mesh = random_triangles(300, 21);
    Bvh bvh(mesh);
    SeedStream rng(8);
    for (int i = 0; i < 200; ++i) {
        const Vec3 p(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2));
        double best = kInf;
        for (size_t f = 0; f < mesh.face_count(); ++f)
            best = std::min(best, (closest_point_on_triangle(p, mesh.corner(f, 0), mesh.corner(f, 1), mesh.corner(f, 2)) - p).norm());
        auto cp = bvh.closest_point(p);
        REQUIRE(cp);
        CHECK(cp->distance == doctest::Approx(best).epsilon(1e-12));
    }
}

TEST_CASE("depth map of a fronto-parallel plane at z=1 is 1 everywhere it hits") {
    TriangleMesh plane = make_grid_plane(Vec2(-5, -5), Vec2(5, 5), 1.0, 1, 1);
    for (auto& f : plane.faces) std::swap(f[1], f[2]);  // face the camera
    plane.recompute_normals();
    Bvh bvh(plane);
    const auto cam = identity_camera(32, 24, 20);
    const auto depth = render_depth_map(bvh, cam);
    for (double d : depth.pixels()) CHECK(d == doctest::Approx(1.0).epsilon(1e-6));
    const auto sky = render_depth_map(bvh, look_at(Vec3(0, 0, 0), Vec3(0, 1, -1), cam.intrinsics));
    int inf = 0;
    for (double d : sky.pixels()) inf += std::isinf(d);
    CHECK(inf == static_cast<int>(sky.size()));
}

TEST_CASE("cube depth map equals the exhaustive oracle, serial and parallel") {
    const auto cube = make_box(Vec3(-0.5, -0.5, 2), Vec3(0.5, 0.5, 3));
    Bvh bvh(cube);
    const auto cam = identity_camera(64, 64, 50);
    const auto oracle_depth = oracle::depth_all_faces(cube, cam);
    CHECK(render_depth_map(bvh, cam, Exec::parallel) == oracle_depth);
    CHECK(render_depth_map(bvh, cam, Exec::serial) == oracle_depth);
}

TEST_CASE("support sampling: flat plane, wall, tilt limits, determinism") {
    const auto plane = make_grid_plane(Vec2(0, 0), Vec2(2, 2), 0.0, 4, 4);
    Bvh bvh(plane);
    std::vector<uint32_t> all(plane.face_count());
    for (uint32_t i = 0; i < all.size(); ++i) all[i] = i;
    const auto pts = sample_support_points(bvh, plane, all, 5, 7);
    CHECK(pts.size() == 5);
    for (const auto& p : pts) CHECK(p.z() == 0.0);
    CHECK(pts == sample_support_points(bvh, plane, all, 5, 7));

    TriangleMesh wall = tilted_plane(90);
    Bvh wall_bvh(wall);
    std::vector<uint32_t> wall_faces(wall.face_count());
    for (uint32_t i = 0; i < wall_faces.size(); ++i) wall_faces[i] = i;
    CHECK_THROWS_AS(sample_support_points(wall_bvh, wall, wall_faces, 1, 0), Error);

    for (auto [deg, ok] : {std::pair{9.0, true}, std::pair{11.0, false}}) {
        const auto tilted = tilted_plane(deg);
        Bvh tb(tilted);
        std::vector<uint32_t> faces(tilted.face_count());
        for (uint32_t i = 0; i < faces.size(); ++i) faces[i] = i;
        // Oracle: the flatness predicate written as a direct dot product.
        const double c = tilted.face_normals[0].dot(Vec3::UnitZ());
        CHECK((c >= std::cos(10.0 * kPi / 180.0)) == ok);
        if (ok) CHECK(sample_support_points(tb, tilted, faces, 3, 1).size() == 3);
        else {
            try {
                sample_support_points(tb, tilted, faces, 3, 1);
                FAIL("expected NoFlatSupport");
            } catch (const Error& e) {
                CHECK(e.kind() == ErrorKind::NoFlatSupport);
            }
        }
    }
}

TEST_CASE("support sampling honours the clearance predicate") {
    auto floor = make_grid_plane(Vec2(0, 0), Vec2(1, 1), 0.0, 1, 1);
    auto ceiling = make_grid_plane(Vec2(0, 0), Vec2(1, 1), 0.3, 1, 1);
    std::array parts{floor, ceiling};
    const auto scene = merge_meshes(parts);
    Bvh bvh(scene);
    std::vector<uint32_t> floor_faces{0, 1};
    CHECK_THROWS_AS(sample_support_points(bvh, scene, floor_faces, 1, 0), Error);
    SupportParams p;
    p.clearance_min = 0.2;
    CHECK(sample_support_points(bvh, scene, floor_faces, 1, 0, p).size() == 1);
}

TEST_CASE("convex hull: tetrahedron, cube with interior points, random containment") {
    std::vector<Vec3> tet{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)};
    const auto th = convex_hull(tet);
    CHECK(th.face_count() == 4);
    CHECK(th.vertices == tet);
    CHECK(is_watertight(th));

    std::vector<Vec3> pts;
    for (int i = 0; i < 8; ++i) pts.emplace_back(i & 1, (i >> 1) & 1, (i >> 2) & 1);
    SeedStream rng(3);
    for (int i = 0; i < 50; ++i) pts.emplace_back(rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9));
    const auto ch = convex_hull(pts);
    CHECK(ch.vertices.size() == 8);
    CHECK(ch.face_count() == 12);
    CHECK(is_watertight(ch));

    std::vector<Vec3> cloud;
    for (int i = 0; i < 200; ++i) cloud.emplace_back(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    const auto rh = convex_hull(cloud);
    CHECK(is_watertight(rh));
    const auto planes = face_planes(rh);
    for (const auto& p : cloud) CHECK(planes.contains(p, 1e-9));

    std::vector<Vec3> flat{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(1, 1, 0)};
    CHECK_THROWS_AS(convex_hull(flat), Error);
}

TEST_CASE("mass properties of cubes and spheres") {
    const auto cube = make_box(Vec3(0, 0, 0), Vec3(1, 1, 1));
    const auto mp = mass_properties(cube);
    CHECK(mp.volume == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((mp.center_of_mass - Vec3(0.5, 0.5, 0.5)).norm() < 1e-12);
    CHECK(mp.inertia(0, 0) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
    CHECK(std::abs(mp.inertia(0, 1)) < 1e-12);

    const auto moved = make_box(Vec3(3, -2, 5), Vec3(4, -1, 6));
    CHECK((mass_properties(moved).center_of_mass - Vec3(3.5, -1.5, 5.5)).norm() < 1e-12);

    // Two midpoint subdivisions (320 faces) inscribe 96.6% of the ball; three reach 99.2%.
    const double ball = 4.0 * kPi / 3.0;
    const auto sphere = make_icosphere(1.0, 2);
    const double v = mass_properties(sphere).volume;
    CHECK(std::abs(v - ball) / ball < 0.035);
    CHECK(std::abs(mass_properties(make_icosphere(1.0, 3)).volume - ball) / ball < 0.02);
    CHECK(v == doctest::Approx(oracle::prism_volume(sphere)).epsilon(1e-12));

    TriangleMesh open = cube;
    open.faces.pop_back();
    CHECK_THROWS_AS(mass_properties(open), Error);
    const auto fb = mass_properties(open, 1.0, true);
    CHECK(fb.surface_fallback);
    CHECK(fb.volume == 0.0);
}

TEST_CASE("fracture: two explicit cells split the cube exactly") {
    const auto cube = make_box(Vec3(0, 0, 0), Vec3(1, 1, 1));
    std::vector<Vec3> sites{Vec3(0.25, 0.5, 0.5), Vec3(0.75, 0.5, 0.5)};
    const auto res = voronoi_fracture(cube, sites);
    REQUIRE(res.pieces.size() == 2);
    double total = 0;
    for (const auto& p : res.pieces) {
        CHECK(is_watertight(p));
        const double v = mass_properties(p).volume;
        CHECK(v == doctest::Approx(oracle::prism_volume(p)).epsilon(1e-12));
        total += v;
    }
    CHECK(std::abs(total - 1.0) < 1e-6);
    CHECK_THROWS_AS(voronoi_fracture(cube, 1, 0), Error);
}

TEST_CASE("fracture: eight random cells are disjoint and conserve volume") {
    const auto cube = make_box(Vec3(0, 0, 0), Vec3(1, 1, 1));
    const auto res = voronoi_fracture(cube, 8, 42);
    CHECK(res.pieces.size() <= 8);
    double total = 0;
    for (const auto& p : res.pieces) {
        CHECK(is_watertight(p));
        total += mass_properties(p).volume;
    }
    CHECK(std::abs(total - 1.0) < 1e-9);
    SeedStream rng(9);
    for (int i = 0; i < 2000; ++i) {
        const Vec3 q(rng.uniform(), rng.uniform(), rng.uniform());
        int count = 0;
        for (const auto& p : res.pieces) count += oracle::inside_by_parity(p, q);
        CHECK(count == 1);
    }
}

TEST_CASE("fracture colors cut faces with the mean input color") {
    auto cube = make_box(Vec3(0, 0, 0), Vec3(1, 1, 1));
    cube.vertex_colors.assign(cube.vertices.size(), Vec3(0.2, 0.4, 0.6));
    cube.vertex_colors[0] = Vec3(1, 1, 1);
    std::vector<Vec3> sites{Vec3(0.25, 0.5, 0.5), Vec3(0.75, 0.5, 0.5)};
    const auto res = voronoi_fracture(cube, sites);
    const Vec3 mean = cube.mean_color();
    bool found = false;
    for (const auto& p : res.pieces) {
        REQUIRE(p.has_colors());
        for (size_t v = 0; v < p.vertices.size(); ++v)
            if (std::abs(p.vertices[v].x() - 0.5) < 1e-12 && std::abs(p.vertices[v].y() - 0.5) < 1e-12 &&
                std::abs(p.vertices[v].z() - 0.5) < 1e-12)
                found = found || (p.vertex_colors[v] - mean).norm() < 1e-12;
    }
    CHECK(found);
}

TEST_CASE("plane patch: cube top removed and re-closed") {
    const auto cube = make_box(Vec3(0, 0, 0), Vec3(1, 1, 1));
    std::vector<uint32_t> top;
    for (uint32_t f = 0; f < cube.face_count(); ++f)
        if (cube.face_normals[f].z() > 0.5) top.push_back(f);
    REQUIRE(top.size() == 2);
    const auto res = plane_patch_hole(cube, top);
    CHECK(is_watertight(res.mesh));
    CHECK(res.patch_face_count == 2);
    for (size_t f = 0; f < res.mesh.face_count(); ++f) {
        if (res.face_origin[f] >= 0) continue;
        for (int k = 0; k < 3; ++k)
            CHECK(std::abs(res.plane_normal.dot(res.mesh.corner(f, k) - res.plane_point)) < 1e-6);
        CHECK(res.mesh.face_normals[f].z() > 0.99);
    }
}

TEST_CASE("plane patch: two separate holes report MultipleLoops") {
    const auto cube = make_box(Vec3(0, 0, 0), Vec3(1, 1, 1));
    std::vector<uint32_t> two;
    for (uint32_t f = 0; f < cube.face_count(); ++f)
        if (std::abs(cube.face_normals[f].z()) > 0.5) two.push_back(f);
    try {
        plane_patch_hole(cube, two);
        FAIL("expected MultipleLoops");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::MultipleLoops);
    }
}

TEST_CASE("plane patch: a hole touching an existing border is open") {
    const auto plane = make_grid_plane(Vec2(0, 0), Vec2(3, 3), 0.0, 3, 3);
    std::vector<uint32_t> corner{0, 1};
    try {
        plane_patch_hole(plane, corner);
        FAIL("expected OpenBoundary");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::OpenBoundary);
    }
}

TEST_CASE("kd-tree nearest equals brute force including ties") {
    SeedStream rng(4);
    std::vector<Vec3> pts;
    for (int i = 0; i < 500; ++i) pts.emplace_back(std::floor(rng.uniform(0, 5)), std::floor(rng.uniform(0, 5)), 0.0);
    KdTree tree(pts);
    for (int i = 0; i < 500; ++i) {
        const Vec3 q(rng.uniform(-1, 6), rng.uniform(-1, 6), rng.uniform(-1, 1));
        uint32_t best = 0;
        for (uint32_t k = 1; k < pts.size(); ++k)
            if ((pts[k] - q).squaredNorm() < (pts[best] - q).squaredNorm()) best = k;
        CHECK(tree.nearest(q) == best);
    }
}
