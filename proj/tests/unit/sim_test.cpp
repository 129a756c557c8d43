#include <doctest.h>

#include "vfx/core/error.hpp"
#include "vfx/sim/physics.hpp"
#include "vfx/sim/trajectory.hpp"

#include <memory>

using namespace vfx;

namespace {

std::vector<Vec3> sphere_points(double r, const Vec3& c) {
    auto m = make_icosphere(r, 3);
    for (auto& v : m.vertices) v += c;
    return m.vertices;
}

TriangleMesh ground() { return make_grid_plane(Vec2(-5, -5), Vec2(5, 5), 0.0, 4, 4); }

SceneObject ball(const std::string& id, const Vec3& at, double r = 0.12) {
    SceneObject o;
    o.object_id = id;
    o.name = "ball";
    o.mesh = make_icosphere(r, 2);
    o.transform.translation = at;
    o.physics_enabled = true;
    o.inserted = true;
    return o;
}

std::shared_ptr<const SceneBundle> ground_bundle() {
    auto b = std::make_shared<SceneBundle>();
    b->mesh = ground();
    return b;
}

template <class F>
ErrorKind kind_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error raised");
    return ErrorKind::ConfigError;
}

}  // namespace

TEST_CASE("free fall follows the closed form") {
    const auto trace = simulate_single_body(sphere_points(0.2, Vec3(0, 0, 10)), Vec3::Zero(), TriangleMesh{},
                                            ContactParams{}, 25, 24.0);
    const double t = 1.0;
    CHECK(std::abs(trace.states.back().position.z() - (10.0 - 0.5 * 9.81 * t * t)) <= 1e-3);
    CHECK(std::abs(trace.states.back().position.x()) <= 1e-12);
}

TEST_CASE("inelastic sphere comes to rest on the plane") {
    ContactParams p;
    p.restitution = 0;
    const double r = 0.25;
    const auto trace = simulate_single_body(sphere_points(r, Vec3(0, 0, 1 + r)), Vec3::Zero(), ground(), p, 72, 24.0);
    CHECK(std::abs(trace.states.back().position.z() - r) <= 1e-3);
    for (double pen : trace.max_penetration) CHECK(pen <= 2e-3);
    for (size_t f = 1; f < trace.states.size(); ++f) {
        const double e0 = mechanical_energy(trace.states[f - 1]), e1 = mechanical_energy(trace.states[f]);
        CHECK(e1 <= e0 + 0.01 * std::abs(e0));
    }
}

TEST_CASE("elastic bounce keeps its speed") {
    ContactParams p;
    p.restitution = 1;
    p.friction = 0;
    const double r = 0.25;
    const auto trace = simulate_single_body(sphere_points(r, Vec3(0, 0, 1 + r)), Vec3::Zero(), ground(), p, 240, 240.0);
    // v^2 + 2 g z is constant in flight; compare it before and after the first bounce.
    const auto q = [](const RigidBodyState& s) { return s.linear_velocity.squaredNorm() + 2 * 9.81 * s.position.z(); };
    size_t flip = 0;
    for (size_t f = 1; f < trace.states.size(); ++f)
        if (trace.states[f - 1].linear_velocity.z() < 0 && trace.states[f].linear_velocity.z() > 0) {
            flip = f;
            break;
        }
    REQUIRE(flip > 2);
    const double before = std::sqrt(q(trace.states[flip - 2])), after = std::sqrt(q(trace.states[flip + 2]));
    CHECK(std::abs(after - before) <= 0.02 * before);
}

TEST_CASE("contact parameters are range checked") {
    ContactParams p;
    p.restitution = 1.5;
    CHECK(kind_of([&] { validate_contact_params(p); }) == ErrorKind::ConfigError);
}

TEST_CASE("simulate_rigid is deterministic and settles balls on the ground") {
    const auto run = [] {
        SceneRepresentation rep(ground_bundle());
        rep.add_object(ball("a", Vec3(0, 0, 1)));
        rep.add_object(ball("b", Vec3(0.05, 0.02, 1.4)));
        return simulate_rigid(rep, {"a", "b"}, ContactParams{}, 48, 24.0, 3);
    };
    const Timeline t1 = run(), t2 = run();
    CHECK(serialize_timeline(t1) == serialize_timeline(t2));
    CHECK(t1.tracks == t2.tracks);
    REQUIRE(t1.tracks.size() == 2);
    for (const auto& [id, track] : t1.tracks) {
        CHECK(track.size() == 48);
        CHECK(track.back().transform.translation.z() > 0.0);
        CHECK(track.back().transform.translation.z() < 0.5);
    }
    CHECK_NOTHROW(validate_timeline(t1));
}

TEST_CASE("simulate_rigid rejects objects without physics or volume") {
    SceneRepresentation rep(ground_bundle());
    auto o = ball("a", Vec3(0, 0, 1));
    o.physics_enabled = false;
    rep.add_object(o);
    CHECK(kind_of([&] { simulate_rigid(rep, {"a"}, ContactParams{}, 4, 24, 0); }) == ErrorKind::PreconditionFailed);

    SceneObject flat;
    flat.object_id = "flat";
    flat.name = "flat";
    flat.mesh = make_grid_plane(Vec2(0, 0), Vec2(1, 1), 0, 1, 1);
    flat.physics_enabled = true;
    flat.inserted = true;
    rep.add_object(flat);
    CHECK(kind_of([&] { simulate_rigid(rep, {"flat"}, ContactParams{}, 4, 24, 0); }) == ErrorKind::MissingHull);
}

TEST_CASE("a fracturable cube breaks on impact") {
    SceneRepresentation rep(ground_bundle());
    SceneObject cube;
    cube.object_id = "cube";
    cube.name = "cube";
    cube.mesh = make_box(Vec3(-0.2, -0.2, -0.2), Vec3(0.2, 0.2, 0.2));
    cube.transform.translation = Vec3(0, 0, 1.5);
    cube.physics_enabled = true;
    cube.fracture_enabled = true;
    cube.inserted = true;
    rep.add_object(cube);
    const Timeline tl = simulate_rigid(rep, {"cube"}, ContactParams{}, 24, 24.0, 1);
    const auto& parent = tl.tracks.at("cube");
    CHECK(parent.front().visible);
    CHECK_FALSE(parent.back().visible);
    size_t pieces = 0;
    for (const auto& [id, track] : tl.tracks)
        if (id.rfind("cube_piece_", 0) == 0) {
            ++pieces;
            CHECK(track.size() == 24);
            CHECK_FALSE(track.front().visible);
            CHECK(track.back().visible);
            CHECK(rep.objects.count(id) == 1);
        }
    CHECK(pieces > 50);
}

TEST_CASE("break at start hides the parent from frame 0") {
    SceneRepresentation rep(ground_bundle());
    SceneObject cube;
    cube.object_id = "c";
    cube.name = "c";
    cube.mesh = make_box(Vec3(0, 0, 0), Vec3(0.3, 0.3, 0.3));
    cube.physics_enabled = true;
    cube.break_at_start = true;
    cube.inserted = true;
    rep.add_object(cube);
    const Timeline tl = simulate_rigid(rep, {"c"}, ContactParams{}, 3, 24.0, 1);
    for (const auto& s : tl.tracks.at("c")) CHECK_FALSE(s.visible);
    CHECK(tl.tracks.at("c_piece_0").front().visible);
}

TEST_CASE("bezier path basics") {
    const std::vector<Vec3> two{Vec3(0, 0, 0), Vec3(2, 4, 0)};
    CHECK((bezier_path(two, 0.5).position - Vec3(1, 2, 0)).norm() <= 1e-9);
    const std::vector<Vec3> keys{Vec3(0, 0, 0), Vec3(1, 2, 0), Vec3(3, 1, 1), Vec3(4, 4, 0), Vec3(6, 0, 0)};
    const BezierPath path(keys);
    CHECK(path.at(0).position == keys.front());
    CHECK(path.at(1).position == keys.back());
    CHECK(kind_of([] { BezierPath(std::vector<Vec3>{Vec3::Zero()}); }) == ErrorKind::TooFewPoints);
}

TEST_CASE("bezier path interpolates keypoints on a circle arc") {
    std::vector<Vec3> keys;
    for (int i = 0; i < 4; ++i) keys.emplace_back(std::cos(i * 0.5), std::sin(i * 0.5), 0);
    const BezierPath path(keys);
    // Dense sampling: the closest sample to each interior keypoint converges to 0
    // and the keypoint parameter hits it exactly.
    for (int k = 1; k < 3; ++k) {
        double best = kInf;
        for (int i = 0; i <= 20000; ++i) best = std::min(best, (path.at(i / 20000.0).position - keys[k]).norm());
        CHECK(best <= 1e-3);
        CHECK((path.at(path.keypoint_parameters()[k]).position - keys[k]).norm() <= 1e-6);
    }
}

TEST_CASE("bezier path is arc-length parameterized") {
    const std::vector<Vec3> keys{Vec3(0, 0, 0), Vec3(1, 0.5, 0), Vec3(2, -0.5, 0.3), Vec3(4, 0, 0)};
    const BezierPath path(keys);
    const int n = 50;
    std::vector<double> steps;
    for (int i = 0; i < n; ++i) {
        double len = 0;
        for (int k = 0; k < 20; ++k) {
            const double t0 = (i + k / 20.0) / n, t1 = (i + (k + 1) / 20.0) / n;
            len += (path.at(t1).position - path.at(t0).position).norm();
        }
        steps.push_back(len);
    }
    const double mean = path.length() / n;
    for (double s : steps) CHECK(std::abs(s - mean) <= 0.01 * mean);
}

TEST_CASE("straight trajectory has constant yaw and even spacing") {
    SceneObject car;
    car.object_id = "car";
    const std::vector<Vec3> keys{Vec3(0, 0, 0), Vec3(5, 0, 0)};
    const Timeline tl = animate_trajectory(car, keys, 11, 24);
    const auto& tr = tl.tracks.at("car");
    for (size_t f = 0; f < tr.size(); ++f) {
        CHECK(tr[f].transform.rotation.angularDistance(Quat::Identity()) <= 1e-12);
        CHECK(std::abs(tr[f].transform.translation.x() - 0.5 * f) <= 0.01 * 0.5);
    }
    const Timeline one = animate_trajectory(car, keys, 1, 24);
    CHECK(one.tracks.at("car").front().transform.translation == keys.front());
}

TEST_CASE("L-shaped trajectory turns 90 degrees monotonically") {
    SceneObject car;
    car.object_id = "car";
    const std::vector<Vec3> keys{Vec3(0, 0, 0), Vec3(4, 0, 0), Vec3(4, 4, 0)};
    const Timeline tl = animate_trajectory(car, keys, 97, 24);
    const auto& tr = tl.tracks.at("car");
    double prev = -1e9;
    for (const auto& s : tr) {
        const Vec3 fwd = s.transform.rotation * Vec3::UnitX();
        const double yaw = std::atan2(fwd.y(), fwd.x());
        CHECK(yaw >= prev - 1e-12);
        prev = yaw;
    }
    const auto yaw_of = [](const TrackSample& s) {
        const Vec3 fwd = s.transform.rotation * Vec3::UnitX();
        return std::atan2(fwd.y(), fwd.x());
    };
    CHECK(std::abs(yaw_of(tr.back()) - yaw_of(tr.front()) - kPi / 2) <= 1e-6);
}

TEST_CASE("merge_timelines unions tracks and rejects conflicts") {
    SceneObject a, b;
    a.object_id = "a";
    b.object_id = "b";
    const std::vector<Vec3> keys{Vec3(0, 0, 0), Vec3(1, 0, 0)};
    const Timeline ta = animate_trajectory(a, keys, 5, 24), tb = animate_trajectory(b, keys, 5, 24);
    const std::vector<Timeline> both{ta, tb};
    CHECK(merge_timelines(both).tracks.size() == 2);
    const std::vector<Timeline> with_empty{ta, Timeline{}};
    CHECK(merge_timelines(with_empty).tracks == ta.tracks);
    const std::vector<Timeline> clash{ta, ta};
    CHECK(kind_of([&] { merge_timelines(clash); }) == ErrorKind::ConflictingTrack);
}
