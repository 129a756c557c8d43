#pragma once

#include "vfx/geometry/bvh.hpp"
#include "vfx/scene/bundle.hpp"
#include "vfx/scene/representation.hpp"

#include <optional>
#include <vector>

namespace vfx {

/// Frame pixels whose smallest channel reaches this code count as over-saturated.
inline constexpr uint8_t kSaturationCode = 250;
inline constexpr double kEmitterVoteFraction = 0.5;

/// Faces hit by saturated pixels in at least half of the views that see them,
/// grouped into connected emitters (white, strength 100). Requires an
/// indoor_full bundle (PreconditionFailed otherwise); NoEmittersFound if none.
std::vector<Emitter> extract_emitters(const SceneBundle& bundle, const Bvh& bvh,
                                      double vote_fraction = kEmitterVoteFraction);

/// Texels contributing to the sun estimate: the brightest 0.1% (at least one).
std::vector<std::pair<int, int>> brightest_texels(const EnvMap& env);

/// Direction of the luminance-weighted centroid of the brightest texels and
/// their summed irradiance (radiance x solid angle x intensity). Returned only
/// for outdoor and driving scenes whose peak luminance exceeds 10x the median.
std::optional<SunLight> sun_from_envmap(const EnvMap& env, SceneType scene_type);

/// Everything the path tracer lights with.
struct Lights {
    std::optional<EnvMap> env;  // sun texels already replaced by the median sky value
    std::optional<SunLight> sun;
    std::vector<Emitter> emitters;  // faces index the bundle mesh
};

/// Indoor-full scenes are lit by emitters only (taken from the bundle or
/// extracted from its frames); other scenes by the environment map and, when
/// one stands out, the sun.
Lights scene_lights(const SceneBundle& bundle, const Bvh& bundle_bvh);

}  // namespace vfx
