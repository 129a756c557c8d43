#pragma once

// Brute-force references for Gaussian rendering and instance lifting. Every
// pixel considers every Gaussian and every ray tests every face.

#include "vfx/scene/bundle.hpp"

#include <array>
#include <map>
#include <string>
#include <vector>

namespace oracle {

struct SplatRender {
    vfx::ColorImage color;
    vfx::FloatImage alpha;
    vfx::FloatImage depth;
};

/// Per-pixel front-to-back compositing over all Gaussians, no tiling or bounds.
SplatRender render_splats_brute(const vfx::GaussianCloud& cloud, const vfx::CameraView& cam);

struct LiftReference {
    std::vector<uint32_t> face_set;
    std::vector<uint32_t> gaussian_set;
    double tau_star = 0;
    std::map<double, double> miou_curve;
    std::array<size_t, 19> face_counts{};
};

/// Threshold sweep evaluated from its definition: exhaustive ray casting for
/// the votes, exhaustive nearest-centroid search, brute-force splat alpha.
LiftReference lift_brute(const vfx::SceneBundle& bundle, const std::string& label);

}  // namespace oracle
