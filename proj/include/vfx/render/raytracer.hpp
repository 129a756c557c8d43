#pragma once

#include "vfx/core/exec.hpp"
#include "vfx/render/lights.hpp"
#include "vfx/scene/representation.hpp"
#include "vfx/scene/timeline.hpp"

#include <vector>

namespace vfx {

inline constexpr int kDefaultSpp = 64;
inline constexpr int kEffectSpp = 512;  // frames with an active fire or smoke event

struct RenderSettings {
    int spp = kDefaultSpp;
    int effect_spp = kEffectSpp;
    int supersample = 2;
    int max_bounces = 3;
    uint64_t seed = 0;
};

/// Albedo for meshes without vertex colors or a texture.
inline const Vec3 kDefaultAlbedo = Vec3::Constant(0.7);

struct RenderPassSet {
    ColorImage object_color;  // radiance weighted by coverage (premultiplied)
    FloatImage object_alpha;
    ColorImage bg_with_objects;
    ColorImage bg_only;
    FloatImage bg_depth;      // camera z, +inf where nothing is hit
    FloatImage object_depth;
    int spp = 0;
    size_t nonfinite = 0;     // samples clamped to zero
};

/// An inserted object and its world transform at one frame.
struct PlacedObject {
    const SceneObject* object;
    Similarity transform;
};

/// Foreground objects visible at `frame`: timeline tracks first, then baked
/// animations, then the object's own transform.
std::vector<PlacedObject> objects_at_frame(const SceneRepresentation& rep, const Timeline& timeline, int frame);

/// Samples per pixel for a frame: effect_spp while a fire or smoke event is active.
int spp_for_frame(const Timeline& timeline, int frame, const RenderSettings& settings);

/// Path-traced passes for one frame, rendered at `supersample` times the
/// camera resolution and box-filtered down. Primary rays sample subpixel
/// centers; every sample has its own seeded generator, so a background sample
/// whose path never meets an inserted object is identical in both background
/// passes and is traced once.
RenderPassSet render_passes(const SceneRepresentation& rep, const Timeline& timeline, int frame,
                            const CameraView& cam, const Lights& lights, const RenderSettings& settings,
                            Exec exec = Exec::parallel);

}  // namespace vfx
