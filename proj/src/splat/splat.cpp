#include "vfx/splat/splat.hpp"

#include <algorithm>

namespace vfx {

GaussianCloud transform_gaussians(const GaussianCloud& cloud, const Similarity& xf) {
    GaussianCloud out = cloud;
    for (auto& g : out) {
        g.center = xf.apply(g.center);
        g.rotation = xf.rotation * g.rotation;
        g.scale = xf.scale * g.scale;
    }
    return out;
}

std::vector<ProjectedSplat> project_splats(const GaussianCloud& cloud, const CameraView& cam) {
    const Intrinsics& k = cam.intrinsics;
    const Rigid cam_from_world = cam.world_from_camera.inverse();
    std::vector<ProjectedSplat> out;
    out.reserve(cloud.size());
    for (size_t i = 0; i < cloud.size(); ++i) {
        const Gaussian& g = cloud[i];
        if (!(g.opacity >= kMinSplatAlpha)) continue;
        const Vec3 p = cam_from_world.apply(g.center);
        if (p.z() <= 0) continue;
        const double z = p.z(), z2 = z * z;
        Eigen::Matrix<double, 2, 3> j;
        j << k.fx / z, 0, -k.fx * p.x() / z2, 0, k.fy / z, -k.fy * p.y() / z2;
        const Mat3 w = cam_from_world.rotation;
        const Mat2 cov = j * (w * g.covariance() * w.transpose()) * j.transpose();
        const double det = cov.determinant();
        if (!(det > 0)) continue;
        ProjectedSplat s;
        s.index = static_cast<uint32_t>(i);
        s.mean = Vec2(k.fx * p.x() / z + k.cx, k.fy * p.y() / z + k.cy);
        s.conic << cov(1, 1) / det, -cov(0, 1) / det, -cov(1, 0) / det, cov(0, 0) / det;
        s.depth = z;
        s.opacity = g.opacity;
        s.color = g.color;
        // Ellipse where opacity * exp(-q/2) >= kMinSplatAlpha, padded by one pixel.
        const double k2 = 2.0 * std::log(g.opacity / kMinSplatAlpha);
        const double rx = std::sqrt(std::max(k2, 0.0) * cov(0, 0)) + 1.0;
        const double ry = std::sqrt(std::max(k2, 0.0) * cov(1, 1)) + 1.0;
        const double fx0 = std::ceil(s.mean.x() - rx - 0.5), fx1 = std::floor(s.mean.x() + rx - 0.5);
        const double fy0 = std::ceil(s.mean.y() - ry - 0.5), fy1 = std::floor(s.mean.y() + ry - 0.5);
        if (fx1 < 0 || fy1 < 0 || fx0 > k.width - 1 || fy0 > k.height - 1) continue;
        s.x0 = static_cast<int>(std::max(fx0, 0.0));
        s.x1 = static_cast<int>(std::min(fx1, k.width - 1.0));
        s.y0 = static_cast<int>(std::max(fy0, 0.0));
        s.y1 = static_cast<int>(std::min(fy1, k.height - 1.0));
        out.push_back(s);
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const ProjectedSplat& a, const ProjectedSplat& b) { return a.depth < b.depth; });
    return out;
}

namespace {

struct PixelState {
    Vec3 color = Vec3::Zero();
    double transmittance = 1.0;
    double depth = kInf;
};

inline void blend(PixelState& st, const ProjectedSplat& s, int x, int y) {
    const double a = splat_alpha(s, x + 0.5, y + 0.5);
    if (a < kMinSplatAlpha) return;
    st.color += st.transmittance * a * s.color;
    st.transmittance *= 1.0 - a;
    if (st.depth == kInf) st.depth = s.depth;
}

SplatImage finish(const std::vector<PixelState>& state, int w, int h) {
    SplatImage img{ColorImage(w, h), FloatImage(w, h), FloatImage(w, h, kInf)};
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const PixelState& st = state[static_cast<size_t>(y) * w + x];
            img.color(x, y) = st.color;
            img.alpha(x, y) = 1.0 - st.transmittance;
            img.depth(x, y) = st.depth;
        }
    return img;
}

}  // namespace

SplatImage render_splats(const GaussianCloud& cloud, const CameraView& cam, Exec exec) {
    const int w = cam.intrinsics.width, h = cam.intrinsics.height;
    const auto splats = project_splats(cloud, cam);
    std::vector<PixelState> state(static_cast<size_t>(w) * h);

    if (exec == Exec::serial) {
        for (const auto& s : splats)
            for (int y = s.y0; y <= s.y1; ++y)
                for (int x = s.x0; x <= s.x1; ++x) blend(state[static_cast<size_t>(y) * w + x], s, x, y);
        return finish(state, w, h);
    }

    std::vector<std::vector<uint32_t>> rows(h);
    for (uint32_t i = 0; i < splats.size(); ++i)
        for (int y = splats[i].y0; y <= splats[i].y1; ++y) rows[y].push_back(i);
#pragma omp parallel for schedule(dynamic, 2)
    for (int y = 0; y < h; ++y) {
        for (uint32_t i : rows[y]) {
            const auto& s = splats[i];
            for (int x = s.x0; x <= s.x1; ++x) blend(state[static_cast<size_t>(y) * w + x], s, x, y);
        }
    }
    return finish(state, w, h);
}

}  // namespace vfx
