#pragma once

#include "vfx/core/exec.hpp"
#include "vfx/core/image.hpp"
#include "vfx/scene/camera.hpp"
#include "vfx/scene/gaussians.hpp"

namespace vfx {

/// Contributions below this alpha are skipped (8-bit significance).
inline constexpr double kMinSplatAlpha = 1.0 / 255.0;

struct SplatImage {
    ColorImage color;  // linear RGB, premultiplied by coverage
    FloatImage alpha;  // 1 - transmittance
    FloatImage depth;  // camera z of the nearest contributing Gaussian; +inf if none
};

/// Centers mapped by the full transform, rotations left-multiplied by its
/// rotation, scales multiplied by its uniform scale.
GaussianCloud transform_gaussians(const GaussianCloud& cloud, const Similarity& xf);

/// 2D footprint of one Gaussian in pixel space.
struct ProjectedSplat {
    uint32_t index;  // into the input cloud
    Vec2 mean;       // pixel coordinates
    Mat2 conic;      // inverse 2D covariance
    double depth;    // camera z
    double opacity;
    Vec3 color;
    int x0, x1, y0, y1;  // inclusive pixel bounds that can receive alpha >= kMinSplatAlpha
};

/// Projection of every visible Gaussian, stably sorted front to back by center depth.
std::vector<ProjectedSplat> project_splats(const GaussianCloud& cloud, const CameraView& cam);

/// alpha_i = opacity * exp(-0.5 d^T conic d) at pixel-center offset d.
inline double splat_alpha(const ProjectedSplat& s, double px, double py) {
    const double dx = px - s.mean.x();
    const double dy = py - s.mean.y();
    const double q = s.conic(0, 0) * dx * dx + 2.0 * s.conic(0, 1) * dx * dy + s.conic(1, 1) * dy * dy;
    return s.opacity * std::exp(-0.5 * q);
}

/// Front-to-back alpha compositing. The parallel path renders rows
/// independently; the serial path scatters one Gaussian at a time. Both
/// perform identical per-pixel arithmetic and agree bit for bit.
SplatImage render_splats(const GaussianCloud& cloud, const CameraView& cam, Exec exec = Exec::parallel);

}  // namespace vfx
