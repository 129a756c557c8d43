#include "vfx/demo/synthetic.hpp"

#include "vfx/core/rng.hpp"
#include "vfx/geometry/bvh.hpp"

#include <algorithm>
#include <numeric>

namespace vfx::demo {
namespace {

// Incremental mesh builder with orientation fixed by an outward hint.
struct MeshBuilder {
    TriangleMesh mesh;

    uint32_t vertex(const Vec3& p, const Vec3& color) {
        mesh.vertices.push_back(p);
        mesh.vertex_colors.push_back(color);
        return static_cast<uint32_t>(mesh.vertices.size() - 1);
    }
    void quad(uint32_t a, uint32_t b, uint32_t c, uint32_t d, const Vec3& outward) {
        const Vec3& pa = mesh.vertices[a];
        const Vec3 n = (mesh.vertices[b] - pa).cross(mesh.vertices[c] - pa);
        if (n.dot(outward) < 0) {
            std::swap(b, d);
        }
        mesh.faces.push_back({a, b, c});
        mesh.faces.push_back({a, c, d});
    }
    TriangleMesh finish() {
        mesh.recompute_normals();
        return std::move(mesh);
    }
};

std::vector<uint32_t> range(uint32_t lo, uint32_t hi) {
    std::vector<uint32_t> r(hi - lo);
    std::iota(r.begin(), r.end(), lo);
    return r;
}

TriangleMesh colored(TriangleMesh m, const Vec3& color) {
    m.vertex_colors.assign(m.vertices.size(), color);
    return m;
}

TriangleMesh bottomless_box(const Vec3& lo, const Vec3& hi, const Vec3& color) {
    TriangleMesh box = make_box(lo, hi);
    std::vector<uint32_t> keep;
    for (uint32_t f = 0; f < box.face_count(); ++f)
        if (box.face_normals[f].z() > -0.5) keep.push_back(f);
    return colored(extract_faces(box, keep), color);
}

// Box without its bottom, every side split into n x n cells.
TriangleMesh tessellated_box(const Vec3& lo, const Vec3& hi, int n, const Vec3& color) {
    MeshBuilder mb;
    const Vec3 e = hi - lo;
    const auto side = [&](const Vec3& origin, const Vec3& u, const Vec3& v, const Vec3& outward) {
        std::vector<uint32_t> ids;
        for (int j = 0; j <= n; ++j)
            for (int i = 0; i <= n; ++i) ids.push_back(mb.vertex(origin + (double(i) / n) * u + (double(j) / n) * v, color));
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const int k = j * (n + 1) + i;
                mb.quad(ids[k], ids[k + 1], ids[k + n + 2], ids[k + n + 1], outward);
            }
    };
    const Vec3 ex(e.x(), 0, 0), ey(0, e.y(), 0), ez(0, 0, e.z());
    side(lo, ex, ez, -Vec3::UnitY());
    side(lo + ey, ex, ez, Vec3::UnitY());
    side(lo, ey, ez, -Vec3::UnitX());
    side(lo + ex, ey, ez, Vec3::UnitX());
    side(lo + ez, ex, ey, Vec3::UnitZ());
    return mb.finish();
}

}  // namespace

std::vector<CameraView> camera_ring(const Vec3& target, double radius, double height, int views,
                                    int width, int height_px, double phase,
                                    double focal_factor) {
    std::vector<CameraView> cams;
    for (int i = 0; i < views; ++i) {
        const double a = phase + 2.0 * kPi * i / views;
        const Vec3 eye = target + Vec3(radius * std::cos(a), radius * std::sin(a), height);
        const double f = focal_factor * std::max(width, height_px);
        cams.push_back(look_at(eye, target, {f, f, width / 2.0, height_px / 2.0, width, height_px}));
    }
    return cams;
}

GaussianCloud sample_surface_gaussians(const TriangleMesh& mesh, const std::vector<uint32_t>& faces,
                                       int count, uint64_t seed) {
    GaussianCloud out;
    if (faces.empty() || count <= 0) return out;
    std::vector<double> cdf;
    double total = 0;
    for (uint32_t f : faces) cdf.push_back(total += mesh.face_area(f));
    SeedStream rng(seed);
    const double s = 0.55 * std::sqrt(total / count);
    for (int i = 0; i < count; ++i) {
        const double u = rng.uniform() * total;
        const size_t k = std::min<size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin(), faces.size() - 1);
        const uint32_t f = faces[k];
        const double r1 = std::sqrt(rng.uniform()), r2 = rng.uniform();
        const double w0 = 1 - r1, w1 = r1 * (1 - r2), w2 = r1 * r2;
        Gaussian g;
        g.center = w0 * mesh.corner(f, 0) + w1 * mesh.corner(f, 1) + w2 * mesh.corner(f, 2);
        Vec3 n = mesh.face_normals[f], t, b;
        make_basis(n, t, b);
        Mat3 r;
        r << t, b, n;
        g.rotation = Quat(r).normalized();
        g.scale = Vec3(s, s, 0.05 * s);
        g.opacity = 0.95;
        if (mesh.has_colors()) {
            const auto& fc = mesh.faces[f];
            g.color = w0 * mesh.vertex_colors[fc[0]] + w1 * mesh.vertex_colors[fc[1]] + w2 * mesh.vertex_colors[fc[2]];
        } else {
            g.color = Vec3::Constant(0.8);
        }
        out.push_back(g);
    }
    return out;
}

void render_ground_truth(SceneBundle& bundle, const std::vector<uint16_t>& face_label) {
    Bvh bvh(bundle.mesh);
    const Vec3 light = Vec3(0.4, 0.3, 1.0).normalized();
    std::set<uint32_t> emissive;
    for (const auto& e : bundle.emitters) emissive.insert(e.faces.begin(), e.faces.end());
    bundle.frames.clear();
    bundle.masks.clear();
    for (const auto& cam : bundle.cameras) {
        const auto ids = render_face_ids(bvh, cam);
        const int w = cam.intrinsics.width, h = cam.intrinsics.height;
        MaskImage mask(w, h, 0);
        ColorImage color(w, h);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const int64_t f = ids(x, y);
                if (f < 0) {
                    const Ray r = pixel_center_ray(cam, x, y);
                    color(x, y) = bundle.env_map ? Vec3(bundle.env_map->lookup(r.direction).cwiseMin(Vec3::Constant(0.9)))
                                                 : Vec3::Zero();
                    continue;
                }
                mask(x, y) = face_label[f];
                if (emissive.count(static_cast<uint32_t>(f))) {
                    color(x, y) = Vec3::Ones();
                    continue;
                }
                const auto& fc = bundle.mesh.faces[f];
                const Vec3 albedo = bundle.mesh.has_colors()
                                        ? Vec3((bundle.mesh.vertex_colors[fc[0]] + bundle.mesh.vertex_colors[fc[1]] +
                                                bundle.mesh.vertex_colors[fc[2]]) / 3.0)
                                        : Vec3::Constant(0.8);
                const double lambert = std::abs(bundle.mesh.face_normals[f].dot(light));
                color(x, y) = albedo * (0.3 + 0.7 * lambert);
            }
        bundle.frames.push_back(encode_srgb(color));
        bundle.masks.push_back(std::move(mask));
    }
}

EnvMap make_sky(int height, const Vec3& sun_direction, double sun_radiance, bool with_sun) {
    EnvMap env;
    env.radiance = ColorImage(2 * height, height);
    const Vec3 zenith(0.35, 0.5, 0.9), horizon(0.8, 0.85, 0.9), ground(0.3, 0.28, 0.25);
    int best_i = 0, best_j = 0;
    double best = -2;
    for (int j = 0; j < height; ++j)
        for (int i = 0; i < 2 * height; ++i) {
            const Vec3 d = env.texel_direction(i, j);
            env.radiance(i, j) = d.z() >= 0 ? Vec3(horizon + d.z() * (zenith - horizon)) : ground;
            const double c = d.dot(sun_direction.normalized());
            if (c > best) best = c, best_i = i, best_j = j;
        }
    if (with_sun) env.radiance(best_i, best_j) = Vec3::Constant(sun_radiance);
    return env;
}

SyntheticScene make_box_on_floor(int views, int size, uint64_t seed) {
    const auto floor = colored(make_grid_plane(Vec2(-2, -2), Vec2(2, 2), 0.0, 40, 40), Vec3(0.6, 0.55, 0.5));
    const auto box = tessellated_box(Vec3(-0.3, -0.3, 0), Vec3(0.3, 0.3, 0.6), 4, Vec3(0.7, 0.2, 0.2));
    std::array parts{floor, box};
    SyntheticScene s;
    s.bundle.mesh = merge_meshes(parts);
    const auto nf = static_cast<uint32_t>(floor.face_count());
    s.target_faces = range(nf, static_cast<uint32_t>(s.bundle.mesh.face_count()));
    s.target_label = "box";
    s.bundle.gaussians = sample_surface_gaussians(s.bundle.mesh, range(0, nf), 200, seed);
    const auto box_g = sample_surface_gaussians(s.bundle.mesh, s.target_faces, 1500, seed + 1);
    s.bundle.gaussians.insert(s.bundle.gaussians.end(), box_g.begin(), box_g.end());
    s.bundle.cameras = camera_ring(Vec3(0, 0, 0.3), 2.0, 1.4, views, size, size, 0.3, 2.2);
    s.bundle.labels = {{1, "box"}};
    s.bundle.scene_type = SceneType::outdoor;
    s.bundle.env_map = make_sky(16, Vec3(0.5, 0.3, 0.8), 150.0);
    s.bundle.env_map->intensity = default_env_intensity(SceneType::outdoor);
    std::vector<uint16_t> labels(s.bundle.mesh.face_count(), 0);
    for (uint32_t f : s.target_faces) labels[f] = 1;
    render_ground_truth(s.bundle, labels);
    return s;
}

SyntheticScene make_block_on_slab(int views, int size, uint64_t seed) {
    MeshBuilder mb;
    const Vec3 slab_color(0.6, 0.6, 0.55), block_color(0.2, 0.4, 0.7);
    const double xs[4] = {-1.5, -0.5, 0.5, 1.5};
    uint32_t top[4][4], bottom[4][4];
    for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 4; ++i) {
            top[j][i] = mb.vertex(Vec3(xs[i], xs[j], 0), slab_color);
            bottom[j][i] = mb.vertex(Vec3(xs[i], xs[j], -0.3), slab_color);
        }
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) {
            mb.quad(bottom[j][i], bottom[j][i + 1], bottom[j + 1][i + 1], bottom[j + 1][i], -Vec3::UnitZ());
            if (i == 1 && j == 1) continue;
            mb.quad(top[j][i], top[j][i + 1], top[j + 1][i + 1], top[j + 1][i], Vec3::UnitZ());
        }
    for (int k = 0; k < 3; ++k) {
        mb.quad(top[0][k], top[0][k + 1], bottom[0][k + 1], bottom[0][k], -Vec3::UnitY());
        mb.quad(top[3][k], top[3][k + 1], bottom[3][k + 1], bottom[3][k], Vec3::UnitY());
        mb.quad(top[k][0], top[k + 1][0], bottom[k + 1][0], bottom[k][0], -Vec3::UnitX());
        mb.quad(top[k][3], top[k + 1][3], bottom[k + 1][3], bottom[k][3], Vec3::UnitX());
    }
    const auto slab_faces = static_cast<uint32_t>(mb.mesh.faces.size());
    // Raised block on the center cell; its walls share the cell's edges.
    const uint32_t c00 = top[1][1], c10 = top[1][2], c11 = top[2][2], c01 = top[2][1];
    const uint32_t u00 = mb.vertex(Vec3(-0.5, -0.5, 0.6), block_color);
    const uint32_t u10 = mb.vertex(Vec3(0.5, -0.5, 0.6), block_color);
    const uint32_t u11 = mb.vertex(Vec3(0.5, 0.5, 0.6), block_color);
    const uint32_t u01 = mb.vertex(Vec3(-0.5, 0.5, 0.6), block_color);
    mb.quad(c00, c10, u10, u00, -Vec3::UnitY());
    mb.quad(c10, c11, u11, u10, Vec3::UnitX());
    mb.quad(c11, c01, u01, u11, Vec3::UnitY());
    mb.quad(c01, c00, u00, u01, -Vec3::UnitX());
    mb.quad(u00, u10, u11, u01, Vec3::UnitZ());

    SyntheticScene s;
    s.bundle.mesh = mb.finish();
    s.target_faces = range(slab_faces, static_cast<uint32_t>(s.bundle.mesh.face_count()));
    s.target_label = "block";
    s.bundle.gaussians = sample_surface_gaussians(s.bundle.mesh, range(0, slab_faces), 200, seed);
    const auto g = sample_surface_gaussians(s.bundle.mesh, s.target_faces, 250, seed + 1);
    s.bundle.gaussians.insert(s.bundle.gaussians.end(), g.begin(), g.end());
    s.bundle.cameras = camera_ring(Vec3(0, 0, 0.2), 2.2, 1.6, views, size, size, 0.2);
    s.bundle.labels = {{1, "block"}};
    s.bundle.scene_type = SceneType::outdoor;
    s.bundle.env_map = make_sky(16, Vec3(0.5, 0.3, 0.8), 150.0);
    s.bundle.env_map->intensity = default_env_intensity(SceneType::outdoor);
    std::vector<uint16_t> labels(s.bundle.mesh.face_count(), 0);
    for (uint32_t f : s.target_faces) labels[f] = 1;
    render_ground_truth(s.bundle, labels);
    return s;
}

SyntheticScene make_random_lift_scene(uint64_t seed, int size) {
    SeedStream rng(seed);
    const int n = 6 + static_cast<int>(rng.index(5));
    std::vector<TriangleMesh> parts{colored(make_grid_plane(Vec2(-2, -2), Vec2(2, 2), 0.0, n, n), Vec3(0.5, 0.5, 0.5))};
    const int boxes = 1 + static_cast<int>(rng.index(3));
    for (int b = 0; b < boxes; ++b) {
        const Vec3 c(rng.uniform(-1.2, 1.2), rng.uniform(-1.2, 1.2), 0);
        const Vec3 half(rng.uniform(0.1, 0.3), rng.uniform(0.1, 0.3), 0);
        const double h = rng.uniform(0.2, 0.7);
        parts.push_back(bottomless_box(c - half, c + half + Vec3(0, 0, h),
                                       Vec3(rng.uniform(), rng.uniform(), rng.uniform())));
    }
    SyntheticScene s;
    s.bundle.mesh = merge_meshes(parts);
    std::vector<uint16_t> labels(s.bundle.mesh.face_count(), 0);
    uint32_t offset = static_cast<uint32_t>(parts[0].face_count());
    s.bundle.gaussians = sample_surface_gaussians(s.bundle.mesh, range(0, offset), 150, rng.next_seed());
    for (int b = 0; b < boxes; ++b) {
        const auto faces = range(offset, offset + static_cast<uint32_t>(parts[b + 1].face_count()));
        for (uint32_t f : faces) labels[f] = static_cast<uint16_t>(b + 1);
        if (b == 0) s.target_faces = faces;
        const auto g = sample_surface_gaussians(s.bundle.mesh, faces, 100, rng.next_seed());
        s.bundle.gaussians.insert(s.bundle.gaussians.end(), g.begin(), g.end());
        s.bundle.labels[static_cast<uint16_t>(b + 1)] = b == 0 ? "target" : "clutter" + std::to_string(b);
        offset += static_cast<uint32_t>(parts[b + 1].face_count());
    }
    s.target_label = "target";
    const int views = 2 + static_cast<int>(rng.index(3));
    s.bundle.cameras = camera_ring(Vec3(0, 0, 0.2), rng.uniform(2.2, 3.0), rng.uniform(1.0, 2.0), views, size,
                                   size, rng.uniform(0, 2 * kPi));
    s.bundle.scene_type = SceneType::indoor_full;
    render_ground_truth(s.bundle, labels);
    // Label noise so the threshold sweep has something to decide.
    for (auto& m : s.bundle.masks)
        for (int k = 0; k < 40; ++k) {
            const int x = static_cast<int>(rng.index(size)), y = static_cast<int>(rng.index(size));
            m(x, y) = m(x, y) == 1 ? 0 : 1;
        }
    return s;
}

SyntheticScene make_table_scene(int views, int width, int height, uint64_t seed) {
    const Vec3 wood(0.45, 0.3, 0.18);
    auto floor = colored(make_grid_plane(Vec2(-3, -3), Vec2(3, 3), 0.0, 12, 12), Vec3(0.55, 0.5, 0.45));
    auto top = colored(make_grid_plane(Vec2(-0.6, -0.4), Vec2(0.6, 0.4), 0.75, 6, 4), wood);
    MeshBuilder sides;
    const double x0 = -0.6, x1 = 0.6, y0 = -0.4, y1 = 0.4, h = 0.75;
    const auto v = [&](double x, double y, double z) { return sides.vertex(Vec3(x, y, z), wood); };
    sides.quad(v(x0, y0, 0), v(x1, y0, 0), v(x1, y0, h), v(x0, y0, h), -Vec3::UnitY());
    sides.quad(v(x0, y1, 0), v(x1, y1, 0), v(x1, y1, h), v(x0, y1, h), Vec3::UnitY());
    sides.quad(v(x0, y0, 0), v(x0, y1, 0), v(x0, y1, h), v(x0, y0, h), -Vec3::UnitX());
    sides.quad(v(x1, y0, 0), v(x1, y1, 0), v(x1, y1, h), v(x1, y0, h), Vec3::UnitX());
    const auto vase = bottomless_box(Vec3(1.2, 0.6, 0), Vec3(1.45, 0.85, 0.45), Vec3(0.2, 0.5, 0.3));
    std::array parts{floor, top, sides.finish(), vase};

    SyntheticScene s;
    s.bundle.mesh = merge_meshes(parts);
    std::vector<uint16_t> labels(s.bundle.mesh.face_count(), 0);
    const auto nf = static_cast<uint32_t>(floor.face_count());
    const auto nt = nf + static_cast<uint32_t>(top.face_count() + parts[2].face_count());
    s.target_faces = range(nf, nt);
    for (uint32_t f : s.target_faces) labels[f] = 1;
    for (uint32_t f = nt; f < s.bundle.mesh.face_count(); ++f) labels[f] = 2;
    s.target_label = "table";
    s.bundle.labels = {{1, "table"}, {2, "vase"}};
    s.bundle.gaussians = sample_surface_gaussians(s.bundle.mesh, range(0, nf), 400, seed);
    for (auto faces : {s.target_faces, range(nt, static_cast<uint32_t>(s.bundle.mesh.face_count()))}) {
        const auto g = sample_surface_gaussians(s.bundle.mesh, faces, 300, seed + faces.size());
        s.bundle.gaussians.insert(s.bundle.gaussians.end(), g.begin(), g.end());
    }
    s.bundle.cameras = camera_ring(Vec3(0, 0, 0.4), 3.0, 1.8, views, width, height, 0.6);
    s.bundle.scene_type = SceneType::outdoor;
    s.bundle.env_map = make_sky(16, Vec3(0.5, 0.3, 0.8), 150.0);
    s.bundle.env_map->intensity = default_env_intensity(SceneType::outdoor);
    render_ground_truth(s.bundle, labels);
    return s;
}

SyntheticScene make_room_with_light(int views, int size) {
    MeshBuilder mb;
    const Vec3 wall(0.7, 0.7, 0.65);
    const double xs[4] = {-2.0, -0.5, 0.5, 2.0};
    const double ceiling = 2.5;
    const Vec3 inward_down = -Vec3::UnitZ();
    uint32_t light_first = 0;
    uint32_t c[4][4], f[4][4];
    for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 4; ++i) {
            c[j][i] = mb.vertex(Vec3(xs[i], xs[j], ceiling), wall);
            f[j][i] = mb.vertex(Vec3(xs[i], xs[j], 0), wall);
        }
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) {
            mb.quad(f[j][i], f[j][i + 1], f[j + 1][i + 1], f[j + 1][i], Vec3::UnitZ());
            if (i == 1 && j == 1) continue;
            mb.quad(c[j][i], c[j][i + 1], c[j + 1][i + 1], c[j + 1][i], inward_down);
        }
    light_first = static_cast<uint32_t>(mb.mesh.faces.size());
    mb.quad(c[1][1], c[1][2], c[2][2], c[2][1], inward_down);
    const uint32_t light_end = static_cast<uint32_t>(mb.mesh.faces.size());
    for (int k = 0; k < 3; ++k) {
        mb.quad(c[0][k], c[0][k + 1], f[0][k + 1], f[0][k], Vec3::UnitY());
        mb.quad(c[3][k], c[3][k + 1], f[3][k + 1], f[3][k], -Vec3::UnitY());
        mb.quad(c[k][0], c[k + 1][0], f[k + 1][0], f[k][0], Vec3::UnitX());
        mb.quad(c[k][3], c[k + 1][3], f[k + 1][3], f[k][3], -Vec3::UnitX());
    }
    SyntheticScene s;
    s.bundle.mesh = mb.finish();
    s.target_faces = range(light_first, light_end);
    s.target_label = "light";
    s.bundle.scene_type = SceneType::indoor_full;
    s.bundle.gaussians = sample_surface_gaussians(s.bundle.mesh, range(0, static_cast<uint32_t>(s.bundle.mesh.face_count())), 300, 3);
    for (int i = 0; i < views; ++i) {
        const double a = 2.0 * kPi * i / views + 0.4;
        const Vec3 eye(1.3 * std::cos(a), 1.3 * std::sin(a), 1.2);
        const Vec3 target(-0.4 * std::cos(a), -0.4 * std::sin(a), 2.5);
        s.bundle.cameras.push_back(look_at(eye, target, {0.5 * size, 0.5 * size, size / 2.0, size / 2.0, size, size}));
    }
    // Ground-truth emitters only drive frame synthesis; tests clear them afterwards.
    s.bundle.emitters = {Emitter{s.target_faces}};
    render_ground_truth(s.bundle, std::vector<uint16_t>(s.bundle.mesh.face_count(), 0));
    s.bundle.emitters.clear();
    return s;
}

SyntheticScene make_sun_floor(int size) {
    SyntheticScene s;
    s.bundle.mesh = colored(make_grid_plane(Vec2(-6, -6), Vec2(6, 6), 0.0, 12, 12), Vec3::Constant(0.5));
    s.bundle.scene_type = SceneType::outdoor;
    // Sky kept dim so the sun dominates and ambient occlusion stays small.
    EnvMap env = make_sky(32, Vec3(0.6, 0.35, 0.5), 1.0, false);
    for (auto& px : env.radiance.pixels()) px *= 0.02;
    const Vec3 sun = Vec3(0.6, 0.35, 0.5).normalized();
    int bi = 0, bj = 0;
    double best = -2;
    for (int j = 0; j < env.radiance.height(); ++j)
        for (int i = 0; i < env.radiance.width(); ++i)
            if (const double c = env.texel_direction(i, j).dot(sun); c > best) best = c, bi = i, bj = j;
    env.radiance(bi, bj) = Vec3::Constant(3.0 / (env.texel_solid_angle(bj) * default_env_intensity(SceneType::outdoor)));
    env.intensity = default_env_intensity(SceneType::outdoor);
    s.bundle.env_map = env;
    s.bundle.gaussians = sample_surface_gaussians(s.bundle.mesh, range(0, static_cast<uint32_t>(s.bundle.mesh.face_count())), 200, 5);
    s.bundle.cameras = {look_at(Vec3(-1.7, 1.5, 1.6), Vec3(-0.4, -0.25, 0.1), {0.9 * size, 0.9 * size, size / 2.0, size / 2.0, size, size})};
    render_ground_truth(s.bundle, std::vector<uint16_t>(s.bundle.mesh.face_count(), 0));
    return s;
}

}  // namespace vfx::demo
