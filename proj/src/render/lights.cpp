#include "vfx/render/lights.hpp"

#include "vfx/core/error.hpp"

#include <algorithm>
#include <numeric>

namespace vfx {

std::vector<Emitter> extract_emitters(const SceneBundle& bundle, const Bvh& bvh, double vote_fraction) {
    if (bundle.scene_type != SceneType::indoor_full)
        throw Error(ErrorKind::PreconditionFailed, "emitter extraction needs an indoor_full scene");
    const size_t nf = bvh.mesh().face_count();
    std::vector<uint32_t> votes(nf, 0), seen(nf, 0);
    for (size_t v = 0; v < bundle.cameras.size() && v < bundle.frames.size(); ++v) {
        const CameraView& cam = bundle.cameras[v];
        const Rgb8Image& frame = bundle.frames[v];
        if (frame.width() != cam.intrinsics.width || frame.height() != cam.intrinsics.height)
            throw Error(ErrorKind::ResolutionMismatch, "frame " + std::to_string(v) + " does not match its camera");
        const auto ids = render_face_ids(bvh, cam);
        std::vector<uint8_t> vis(nf, 0), hot(nf, 0);
        for (int y = 0; y < frame.height(); ++y)
            for (int x = 0; x < frame.width(); ++x) {
                const int64_t f = ids(x, y);
                if (f < 0) continue;
                vis[f] = 1;
                const Rgb8 c = frame(x, y);
                if (std::min({c.r, c.g, c.b}) >= kSaturationCode) hot[f] = 1;
            }
        for (size_t f = 0; f < nf; ++f) {
            seen[f] += vis[f];
            votes[f] += hot[f];
        }
    }
    std::vector<uint32_t> faces;
    for (uint32_t f = 0; f < nf; ++f)
        if (votes[f] > 0 && votes[f] >= vote_fraction * seen[f]) faces.push_back(f);
    if (faces.empty()) throw Error(ErrorKind::NoEmittersFound, "no face is saturated in enough views");

    // Connected groups through shared vertices.
    const auto& mesh = bvh.mesh();
    std::vector<uint32_t> parent(mesh.vertices.size());
    std::iota(parent.begin(), parent.end(), 0u);
    const auto find = [&](uint32_t a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    };
    for (uint32_t f : faces)
        for (int k = 1; k < 3; ++k) {
            const uint32_t a = find(mesh.faces[f][0]), b = find(mesh.faces[f][k]);
            if (a != b) parent[std::max(a, b)] = std::min(a, b);
        }
    std::map<uint32_t, Emitter> groups;
    for (uint32_t f : faces) groups[find(mesh.faces[f][0])].faces.push_back(f);
    std::vector<Emitter> out;
    for (auto& [root, e] : groups) out.push_back(std::move(e));
    return out;
}

std::vector<std::pair<int, int>> brightest_texels(const EnvMap& env) {
    const int w = env.radiance.width(), h = env.radiance.height();
    std::vector<int> idx(static_cast<size_t>(w) * h);
    std::iota(idx.begin(), idx.end(), 0);
    const auto lum = [&](int i) { return luminance(env.radiance.pixels()[i]); };
    const size_t count = std::max<size_t>(1, idx.size() / 1000);
    std::partial_sort(idx.begin(), idx.begin() + count, idx.end(), [&](int a, int b) {
        return lum(a) != lum(b) ? lum(a) > lum(b) : a < b;
    });
    std::vector<std::pair<int, int>> out;
    for (size_t k = 0; k < count; ++k) out.emplace_back(idx[k] % w, idx[k] / w);
    return out;
}

namespace {

double median_luminance(const EnvMap& env, Vec3* color = nullptr) {
    std::vector<std::pair<double, int>> l;
    for (size_t i = 0; i < env.radiance.size(); ++i) l.emplace_back(luminance(env.radiance.pixels()[i]), static_cast<int>(i));
    std::nth_element(l.begin(), l.begin() + l.size() / 2, l.end());
    if (color) *color = env.radiance.pixels()[l[l.size() / 2].second];
    return l[l.size() / 2].first;
}

}  // namespace

std::optional<SunLight> sun_from_envmap(const EnvMap& env, SceneType scene_type) {
    if (scene_type != SceneType::outdoor && scene_type != SceneType::driving) return std::nullopt;
    validate_envmap(env, "environment map");
    const auto top = brightest_texels(env);
    const double peak = luminance(env.radiance(top[0].first, top[0].second));
    if (!(peak > 10.0 * median_luminance(env))) return std::nullopt;
    Vec3 dir = Vec3::Zero(), irradiance = Vec3::Zero();
    for (auto [i, j] : top) {
        const Vec3 l = env.radiance(i, j);
        dir += luminance(l) * env.texel_direction(i, j);
        irradiance += l * env.texel_solid_angle(j) * env.intensity;
    }
    if (!(dir.norm() > 0)) return std::nullopt;
    return SunLight{dir.normalized(), irradiance};
}

Lights scene_lights(const SceneBundle& bundle, const Bvh& bundle_bvh) {
    Lights lights;
    if (bundle.scene_type == SceneType::indoor_full) {
        lights.emitters = bundle.emitters.empty() ? extract_emitters(bundle, bundle_bvh) : bundle.emitters;
        return lights;
    }
    if (!bundle.env_map) return lights;
    lights.env = *bundle.env_map;
    lights.sun = sun_from_envmap(*lights.env, bundle.scene_type);
    if (lights.sun) {
        // The sun is lit explicitly; its texels would otherwise count twice.
        Vec3 sky;
        median_luminance(*lights.env, &sky);
        for (auto [i, j] : brightest_texels(*lights.env)) lights.env->radiance(i, j) = sky;
    }
    return lights;
}

}  // namespace vfx
