#include <doctest.h>

#include "oracles/geometry_oracles.hpp"
#include "oracles/shadow_oracle.hpp"
#include "vfx/core/error.hpp"
#include "vfx/demo/synthetic.hpp"
#include "vfx/render/lights.hpp"
#include "vfx/render/raytracer.hpp"

#include <memory>
#include <set>

using namespace vfx;

namespace {

EnvMap flat_env(int h, const Vec3& value) {
    EnvMap env;
    env.radiance = ColorImage(2 * h, h, value);
    return env;
}

std::shared_ptr<SceneBundle> plane_bundle(const EnvMap& env, const Vec3& albedo, int size = 24) {
    auto b = std::make_shared<SceneBundle>();
    b->mesh = make_grid_plane(Vec2(-50, -50), Vec2(50, 50), 0.0, 2, 2);
    b->mesh.vertex_colors.assign(b->mesh.vertices.size(), albedo);
    b->scene_type = SceneType::outdoor;
    b->env_map = env;
    b->cameras = {look_at(Vec3(0, -2, 2), Vec3(0, 0, 0), {0.8 * size, 0.8 * size, size / 2.0, size / 2.0, size, size})};
    return b;
}

SceneObject cube_object(const Vec3& lo, const Vec3& hi) {
    SceneObject o;
    o.object_id = "cube_0";
    o.name = "cube";
    o.mesh = make_box(lo, hi);
    o.inserted = true;
    return o;
}

double mse(const ColorImage& a, const ColorImage& b) {
    double s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += (a.pixels()[i] - b.pixels()[i]).squaredNorm();
    return s / static_cast<double>(a.size());
}

bool identical(const ColorImage& a, const ColorImage& b) {
    for (size_t i = 0; i < a.size(); ++i)
        if (a.pixels()[i] != b.pixels()[i]) return false;
    return true;
}

}  // namespace

TEST_CASE("lighting defaults") {
    CHECK(Emitter{}.strength == 100.0);
    CHECK(default_env_intensity(SceneType::outdoor) == 0.6);
    CHECK(default_env_intensity(SceneType::driving) == 0.6);
    CHECK(default_env_intensity(SceneType::indoor_full) == 2.0);
    CHECK(default_env_intensity(SceneType::indoor_partial) == 2.0);
    CHECK(kDefaultSpp == 64);
}

TEST_CASE("sun estimate from a single hot texel") {
    EnvMap env = flat_env(32, Vec3::Constant(0.2));
    env.intensity = 0.6;
    env.radiance(40, 9) = Vec3::Constant(5000.0);
    const auto sun = sun_from_envmap(env, SceneType::outdoor);
    REQUIRE(sun);
    // Top 0.1% of 2048 texels is 2: the hot one and the first uniform texel.
    const Vec3 expect = (luminance(Vec3::Constant(5000.0)) * env.texel_direction(40, 9) +
                         luminance(Vec3::Constant(0.2)) * env.texel_direction(0, 0))
                            .normalized();
    CHECK((sun->direction - expect).norm() < 1e-12);
    CHECK(sun->direction.dot(env.texel_direction(40, 9)) > 0.9999);
    const double e = (5000.0 * env.texel_solid_angle(9) + 0.2 * env.texel_solid_angle(0)) * 0.6;
    CHECK(std::abs(sun->irradiance.x() - e) < 1e-9 * e);

    CHECK_FALSE(sun_from_envmap(env, SceneType::indoor_partial));
    CHECK_FALSE(sun_from_envmap(flat_env(32, Vec3::Constant(3.0)), SceneType::outdoor));
}

TEST_CASE("sun estimate from two hot texels in one row") {
    EnvMap env = flat_env(32, Vec3::Constant(0.1));
    env.radiance(10, 8) = Vec3::Constant(800.0);
    env.radiance(12, 8) = Vec3::Constant(800.0);
    REQUIRE(brightest_texels(env).size() == 2);
    const auto sun = sun_from_envmap(env, SceneType::driving);
    REQUIRE(sun);
    const Vec3 expect = (env.texel_direction(10, 8) + env.texel_direction(12, 8)).normalized();
    CHECK((sun->direction - expect).norm() < 1e-12);
}

TEST_CASE("scene lights replace sun texels with the sky median") {
    auto scene = demo::make_sun_floor(32);
    const Bvh bvh(scene.bundle.mesh);
    const Lights lights = scene_lights(scene.bundle, bvh);
    REQUIRE(lights.sun);
    REQUIRE(lights.env);
    CHECK(lights.sun->direction.dot(Vec3(0.6, 0.35, 0.5).normalized()) > 0.99);
    double peak = 0;
    for (const Vec3& v : lights.env->radiance.pixels()) peak = std::max(peak, luminance(v));
    CHECK(peak < 0.1);
}

TEST_CASE("emitter extraction finds the ceiling light") {
    auto scene = demo::make_room_with_light();
    const Bvh bvh(scene.bundle.mesh);
    const auto emitters = extract_emitters(scene.bundle, bvh);
    REQUIRE(emitters.size() == 1);
    CHECK(emitters[0].faces == scene.target_faces);
    CHECK(emitters[0].strength == 100.0);
    CHECK(emitters[0].color == Vec3::Ones());

    SUBCASE("saturation in one view of four does not vote a face in") {
        SceneBundle b = scene.bundle;
        std::vector<Image<int64_t>> ids;
        for (const auto& cam : b.cameras) ids.push_back(render_face_ids(bvh, cam));
        std::vector<std::set<size_t>> seen_by(b.mesh.face_count());
        for (size_t v = 0; v < ids.size(); ++v)
            for (int64_t f : ids[v].pixels())
                if (f >= 0) seen_by[f].insert(v);
        int painted = 0;
        for (size_t i = 0; i < ids[0].size(); ++i) {
            const int64_t f = ids[0].pixels()[i];
            if (f >= 0 && seen_by[f].size() == 4) {
                b.frames[0].pixels()[i] = Rgb8{255, 255, 255};
                ++painted;
            }
        }
        REQUIRE(painted > 100);
        const auto again = extract_emitters(b, bvh);
        REQUIRE(again.size() == 1);
        CHECK(again[0].faces == scene.target_faces);
    }
    SUBCASE("no saturated pixels") {
        SceneBundle b = scene.bundle;
        for (auto& frame : b.frames)
            for (auto& px : frame.pixels()) px = Rgb8{100, 100, 100};
        try {
            extract_emitters(b, bvh);
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::NoEmittersFound);
        }
    }
    SUBCASE("requires an indoor scene") {
        SceneBundle b = scene.bundle;
        b.scene_type = SceneType::outdoor;
        try {
            extract_emitters(b, bvh);
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::PreconditionFailed);
        }
    }
}

TEST_CASE("white furnace: a lambertian plane under a uniform sky") {
    const Vec3 sky(0.8, 0.5, 0.3), albedo(0.6, 0.7, 0.9);
    auto b = plane_bundle(flat_env(16, sky), albedo);
    SceneRepresentation rep(b);
    const Lights lights = scene_lights(*b, rep.bundle_bvh());
    CHECK_FALSE(lights.sun);
    RenderSettings rs;
    rs.spp = 8;
    const auto passes = render_passes(rep, Timeline{}, 0, b->cameras[0], lights, rs);
    const Vec3 expect = sky.cwiseProduct(albedo);
    int floor_pixels = 0;
    for (int y = 0; y < passes.bg_only.height(); ++y)
        for (int x = 0; x < passes.bg_only.width(); ++x) {
            if (!std::isfinite(passes.bg_depth(x, y))) continue;
            ++floor_pixels;
            for (int c = 0; c < 3; ++c) CHECK(std::abs(passes.bg_only(x, y)[c] - expect[c]) <= 0.05 * expect[c]);
        }
    CHECK(floor_pixels > 100);
    CHECK(passes.nonfinite == 0);
}

TEST_CASE("passes without objects: no coverage, identical background passes") {
    auto scene = demo::make_sun_floor(24);
    auto b = std::make_shared<SceneBundle>(scene.bundle);
    SceneRepresentation rep(b);
    const Lights lights = scene_lights(*b, rep.bundle_bvh());
    RenderSettings rs;
    rs.spp = 4;
    const auto p = render_passes(rep, Timeline{}, 0, b->cameras[0], lights, rs);
    CHECK(identical(p.bg_with_objects, p.bg_only));
    for (double a : p.object_alpha.pixels()) CHECK(a == 0.0);
    for (double d : p.object_depth.pixels()) CHECK(std::isinf(d));
}

TEST_CASE("background-only pass equals a render of the scene without objects") {
    auto scene = demo::make_sun_floor(24);
    auto b = std::make_shared<SceneBundle>(scene.bundle);
    SceneRepresentation with(b), without(b);
    with.add_object(cube_object(Vec3(-0.3, -0.3, 0), Vec3(0.3, 0.3, 0.6)));
    const Lights lights = scene_lights(*b, with.bundle_bvh());
    RenderSettings rs;
    rs.spp = 6;
    const auto a = render_passes(with, Timeline{}, 0, b->cameras[0], lights, rs);
    const auto c = render_passes(without, Timeline{}, 0, b->cameras[0], lights, rs);
    CHECK(identical(a.bg_only, c.bg_with_objects));
    CHECK_FALSE(identical(a.bg_with_objects, a.bg_only));

    SUBCASE("serial and parallel agree bitwise") {
        const auto s = render_passes(with, Timeline{}, 0, b->cameras[0], lights, rs, Exec::serial);
        CHECK(identical(s.bg_with_objects, a.bg_with_objects));
        CHECK(identical(s.object_color, a.object_color));
    }
}

TEST_CASE("error shrinks with more samples") {
    auto scene = demo::make_sun_floor(20);
    auto b = std::make_shared<SceneBundle>(scene.bundle);
    SceneRepresentation rep(b);
    SceneObject cube = cube_object(Vec3(-0.3, -0.3, 0), Vec3(0.3, 0.3, 0.6));
    cube.material = MaterialSpec{};
    cube.material->roughness = 0.4;
    rep.add_object(cube);
    const Lights lights = scene_lights(*b, rep.bundle_bvh());
    RenderSettings rs;
    rs.seed = 99;
    rs.spp = 256;
    const auto ref = render_passes(rep, Timeline{}, 0, b->cameras[0], lights, rs);
    rs.seed = 1;
    rs.spp = 4;
    const double e4 = mse(render_passes(rep, Timeline{}, 0, b->cameras[0], lights, rs).bg_with_objects, ref.bg_with_objects);
    rs.spp = 32;
    const double e32 = mse(render_passes(rep, Timeline{}, 0, b->cameras[0], lights, rs).bg_with_objects, ref.bg_with_objects);
    CHECK(e32 < 0.5 * e4);
}

TEST_CASE("mirror sphere reflects the environment") {
    EnvMap env = flat_env(16, Vec3(0.1, 0.2, 0.9));
    for (int j = 0; j < 8; ++j)
        for (int i = 0; i < 32; ++i) env.radiance(i, j) = Vec3(1.0, 0.5, 0.2);
    auto b = plane_bundle(env, Vec3::Constant(0.5), 32);
    b->mesh = make_grid_plane(Vec2(-0.1, -0.1), Vec2(0.1, 0.1), -50.0, 1, 1);
    b->cameras = {look_at(Vec3(0, -3, 0.4), Vec3(0, 0, 0), {40, 40, 16, 16, 32, 32})};
    SceneRepresentation rep(b);
    SceneObject ball;
    ball.object_id = "ball_0";
    ball.name = "ball";
    ball.mesh = make_icosphere(1.0, 2);
    ball.inserted = true;
    MaterialSpec chrome;
    chrome.metallic = 1.0;
    chrome.roughness = 0.0;
    chrome.texture_albedo = Vec3::Ones();
    ball.material = chrome;
    rep.add_object(ball);
    const Lights lights = scene_lights(*b, rep.bundle_bvh());
    RenderSettings rs;
    rs.spp = 2;
    rs.supersample = 1;
    const auto p = render_passes(rep, Timeline{}, 0, b->cameras[0], lights, rs);

    int checked = 0;
    for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 32; ++x) {
            const Ray r = pixel_center_ray(b->cameras[0], x, y);
            const auto hit = oracle::intersect_all_faces(ball.mesh, r);
            if (!hit) {
                CHECK(p.object_alpha(x, y) == 0.0);
                continue;
            }
            const Vec3 n = ball.mesh.face_normals[hit->face];
            const Vec3 refl = r.direction - 2 * r.direction.dot(n) * n;
            const Vec3 q = r.at(hit->t) + 1e-5 * n;
            if (oracle::intersect_all_faces(ball.mesh, Ray{q, refl})) continue;
            const Vec3 expect = env.lookup(refl);
            CHECK(p.object_alpha(x, y) == 1.0);
            CHECK((p.object_color(x, y) - expect).norm() < 1e-9);
            ++checked;
        }
    CHECK(checked >= 5);
}

TEST_CASE("cube shadow matches the analytic shadow region") {
    auto scene = demo::make_sun_floor(48);
    auto b = std::make_shared<SceneBundle>(scene.bundle);
    SceneRepresentation rep(b);
    const Vec3 lo(-0.3, -0.3, 0), hi(0.3, 0.3, 0.6);
    SceneObject cube = cube_object(lo, hi);
    cube.mesh.vertex_colors.assign(cube.mesh.vertices.size(), Vec3::Constant(0.1));
    rep.add_object(cube);
    const Lights lights = scene_lights(*b, rep.bundle_bvh());
    REQUIRE(lights.sun);
    RenderSettings rs;
    rs.spp = 64;
    const auto p = render_passes(rep, Timeline{}, 0, b->cameras[0], lights, rs);
    const auto ratio_of = [&](int x, int y) {
        return luminance(p.bg_with_objects(x, y)) / std::max(luminance(p.bg_only(x, y)), 1e-4);
    };
    const MaskImage cls = oracle::classify_box_shadow(b->cameras[0], lo, hi, lights.sun->direction, 0.3);
    int inside = 0, outside = 0;
    double worst_out = 0;
    for (int y = 0; y < cls.height(); ++y)
        for (int x = 0; x < cls.width(); ++x) {
            if (cls(x, y) == oracle::kShadowFloor) {
                ++inside;
                CHECK(ratio_of(x, y) < 1.0);
            } else if (cls(x, y) == oracle::kLitFloor) {
                ++outside;
                worst_out = std::max(worst_out, std::abs(ratio_of(x, y) - 1.0));
            }
        }
    CHECK(inside > 20);
    CHECK(outside > 200);
    CHECK(worst_out <= 0.02);
}
