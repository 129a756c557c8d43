#include <doctest.h>

#include "oracles/geometry_oracles.hpp"
#include "oracles/render_oracles.hpp"
#include "vfx/core/error.hpp"
#include "vfx/core/rng.hpp"
#include "vfx/demo/synthetic.hpp"
#include "vfx/lift/lift.hpp"
#include "vfx/splat/splat.hpp"

#include <Eigen/Eigenvalues>

using namespace vfx;

namespace {

GaussianCloud random_cloud(int n, uint64_t seed) {
    SeedStream rng(seed);
    GaussianCloud cloud;
    for (int i = 0; i < n; ++i) {
        Gaussian g;
        g.center = Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
        g.rotation = Quat(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)).normalized();
        g.scale = Vec3(rng.uniform(0.02, 0.2), rng.uniform(0.02, 0.2), rng.uniform(0.01, 0.1));
        g.opacity = rng.uniform(0.05, 1.0);
        g.color = Vec3(rng.uniform(), rng.uniform(), rng.uniform());
        cloud.push_back(g);
    }
    return cloud;
}

CameraView test_camera(int w = 48, int h = 40) {
    return look_at(Vec3(3, 1, 1.5), Vec3::Zero(), {40, 40, w / 2.0, h / 2.0, w, h});
}

double mean_abs_diff(const FloatImage& a, const FloatImage& b) {
    double s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += std::abs(a.pixels()[i] - b.pixels()[i]);
    return s / static_cast<double>(a.size());
}

Vec3 sorted_eigenvalues(const Mat3& m) {
    Eigen::SelfAdjointEigenSolver<Mat3> es(m);
    return es.eigenvalues();
}

}  // namespace

TEST_CASE("splat render matches per-pixel brute force") {
    const auto cloud = random_cloud(120, 5);
    const auto cam = test_camera();
    const auto img = render_splats(cloud, cam, Exec::serial);
    const auto ref = oracle::render_splats_brute(cloud, cam);
    for (int y = 0; y < cam.intrinsics.height; ++y)
        for (int x = 0; x < cam.intrinsics.width; ++x) {
            CHECK(std::abs(img.alpha(x, y) - ref.alpha(x, y)) <= 1e-5);
            CHECK((img.color(x, y) - ref.color(x, y)).cwiseAbs().maxCoeff() <= 1e-5);
            if (std::isinf(ref.depth(x, y)))
                CHECK(std::isinf(img.depth(x, y)));
            else
                CHECK(std::abs(img.depth(x, y) - ref.depth(x, y)) <= 1e-5);
        }
}

TEST_CASE("splat serial and parallel agree bit for bit") {
    const auto cloud = random_cloud(300, 9);
    const auto cam = test_camera(64, 48);
    const auto a = render_splats(cloud, cam, Exec::serial);
    const auto b = render_splats(cloud, cam, Exec::parallel);
    CHECK(a.color == b.color);
    CHECK(a.alpha == b.alpha);
    CHECK(a.depth == b.depth);
}

TEST_CASE("transparent Gaussians leave the render unchanged") {
    auto cloud = random_cloud(60, 2);
    const auto cam = test_camera();
    const auto base = render_splats(cloud, cam);
    auto extra = cloud;
    for (const auto& g : cloud) {
        Gaussian z = g;
        z.opacity = 0.0;
        extra.push_back(z);
    }
    const auto img = render_splats(extra, cam);
    CHECK(img.color == base.color);
    CHECK(img.alpha == base.alpha);
}

TEST_CASE("projected bounds cover every significant pixel") {
    const auto cloud = random_cloud(80, 13);
    const auto cam = test_camera();
    for (const auto& s : project_splats(cloud, cam))
        for (int y = 0; y < cam.intrinsics.height; ++y)
            for (int x = 0; x < cam.intrinsics.width; ++x) {
                const bool inside = x >= s.x0 && x <= s.x1 && y >= s.y0 && y <= s.y1;
                if (!inside) CHECK(splat_alpha(s, x + 0.5, y + 0.5) < kMinSplatAlpha);
            }
}

TEST_CASE("rotation preserves covariance eigenvalues") {
    const auto cloud = random_cloud(50, 21);
    Similarity xf;
    xf.rotation = Quat(Eigen::AngleAxisd(0.7, Vec3(1, 2, 3).normalized()));
    xf.translation = Vec3(0.3, -1, 2);
    xf.scale = 1.5;
    const auto moved = transform_gaussians(cloud, xf);
    for (size_t i = 0; i < cloud.size(); ++i) {
        const Vec3 before = sorted_eigenvalues(cloud[i].covariance()) * xf.scale * xf.scale;
        const Vec3 after = sorted_eigenvalues(moved[i].covariance());
        CHECK((before - after).cwiseAbs().maxCoeff() <= 1e-9);
    }
}

TEST_CASE("moving the Gaussians equals moving the camera the other way") {
    const auto cloud = random_cloud(150, 17);
    const auto cam = test_camera(64, 64);
    Similarity xf;
    xf.rotation = Quat(Eigen::AngleAxisd(0.4, Vec3(0, 0.3, 1).normalized()));
    xf.translation = Vec3(0.2, 0.1, -0.1);
    const auto moved = render_splats(transform_gaussians(cloud, xf), cam);
    CameraView inv = cam;
    const Similarity back = xf.inverse();
    inv.world_from_camera.rotation = back.rotation.toRotationMatrix() * cam.world_from_camera.rotation;
    inv.world_from_camera.translation = back.apply(cam.world_from_camera.translation);
    const auto ref = render_splats(cloud, inv);
    CHECK(mean_abs_diff(moved.alpha, ref.alpha) <= 1e-4);
}

TEST_CASE("lift equals the definitional sweep on random scenes") {
    for (uint64_t seed : {1u, 2u, 3u}) {
        const auto scene = demo::make_random_lift_scene(seed);
        const Bvh bvh(scene.bundle.mesh);
        const auto got = lift_instance(scene.bundle, bvh, scene.target_label);
        const auto ref = oracle::lift_brute(scene.bundle, scene.target_label);
        CHECK(got.face_set == ref.face_set);
        CHECK(got.gaussian_set == ref.gaussian_set);
        CHECK(got.tau_star == ref.tau_star);
        CHECK(got.miou_curve == ref.miou_curve);
        CHECK(got.face_counts == ref.face_counts);
    }
}

TEST_CASE("lift serial and parallel agree") {
    const auto scene = demo::make_random_lift_scene(4);
    const Bvh bvh(scene.bundle.mesh);
    CHECK(lift_instance(scene.bundle, bvh, scene.target_label, Exec::serial) ==
          lift_instance(scene.bundle, bvh, scene.target_label, Exec::parallel));
}

TEST_CASE("box on floor lifts to exactly the box faces") {
    const auto scene = demo::make_box_on_floor();
    const Bvh bvh(scene.bundle.mesh);
    const auto lift = lift_instance(scene.bundle, bvh, "box");
    CHECK(lift.face_set == scene.target_faces);
    CHECK(lift.miou_curve.at(lift.tau_star) >= 0.9);
    CHECK_FALSE(lift.gaussian_set.empty());
}

TEST_CASE("unknown labels and empty selections raise") {
    const auto scene = demo::make_box_on_floor(2, 32);
    const Bvh bvh(scene.bundle.mesh);
    CHECK_THROWS_AS(lift_instance(scene.bundle, bvh, "giraffe"), Error);
    try {
        lift_instance(scene.bundle, bvh, "giraffe");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::UnknownLabel);
    }
    auto blind = scene.bundle;
    for (auto& m : blind.masks) m = MaskImage(m.width(), m.height(), 0);
    blind.labels = {{1, "box"}};
    try {
        lift_instance(blind, bvh, "box");
        FAIL("expected EmptySelection");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::EmptySelection);
    }
}

TEST_CASE("removing a fused block leaves a closed floor") {
    auto scene = demo::make_block_on_slab();
    REQUIRE(is_watertight(scene.bundle.mesh));
    auto bundle = std::make_shared<const SceneBundle>(scene.bundle);
    SceneRepresentation rep(bundle);
    const auto lift = lift_instance(*bundle, rep.bundle_bvh(), "block");
    REQUIRE(lift.face_set == scene.target_faces);
    auto& obj = extract_object(rep, lift, "block");
    CHECK(obj.in_background);
    const std::string id = obj.object_id;
    remove_instance(rep, id);
    CHECK(rep.objects.empty());
    CHECK(is_watertight(rep.background()));
    for (const auto& cam : bundle->cameras) {
        const auto depth = render_depth_map(rep.background_bvh(), cam);
        for (int y = 0; y < cam.intrinsics.height; ++y)
            for (int x = 0; x < cam.intrinsics.width; ++x) {
                const Ray r = pixel_center_ray(cam, x, y);
                if (!(r.direction.z() < 0)) continue;
                const double t = -r.origin.z() / r.direction.z();
                const Vec3 p = r.at(t);
                if (std::abs(p.x()) >= 0.5 || std::abs(p.y()) >= 0.5) continue;
                CHECK(std::abs(depth(x, y) - ray_depth(cam, r, t)) <= 1e-3);
            }
    }
}
