#pragma once

#include "vfx/scene/bundle.hpp"

#include <cstdint>
#include <vector>

namespace vfx::demo {

/// A constructed bundle together with the ground truth it was built from.
struct SyntheticScene {
    SceneBundle bundle;
    std::vector<uint32_t> target_faces;  // faces of the labelled object, ascending
    std::string target_label;
};

/// Cameras on a horizontal circle around `target`, all looking at it.
std::vector<CameraView> camera_ring(const Vec3& target, double radius, double height, int views,
                                    int width, int height_px, double phase = 0.0,
                                    double focal_factor = 0.9);

/// Thin surface-aligned Gaussians sampled area-weighted over `faces` of `mesh`.
GaussianCloud sample_surface_gaussians(const TriangleMesh& mesh, const std::vector<uint32_t>& faces,
                                       int count, uint64_t seed);

/// Masks by first-hit face label and frames by simple directional shading.
/// `face_label[f]` is the mask id of face f (0 = background).
void render_ground_truth(SceneBundle& bundle, const std::vector<uint16_t>& face_label);

/// Equirectangular sky with an optional sun disc; W = 2H.
EnvMap make_sky(int height, const Vec3& sun_direction, double sun_radiance, bool with_sun = true);

/// Floor grid plus a bottomless, finely tessellated box resting on it, labelled "box".
SyntheticScene make_box_on_floor(int views = 3, int size = 64, uint64_t seed = 1);

/// Floor slab whose top surface is fused with a raised block: removing the
/// block's faces leaves one square hole in an otherwise closed mesh.
SyntheticScene make_block_on_slab(int views = 3, int size = 64, uint64_t seed = 1);

/// Randomized floor + boxes scene for oracle comparisons (<= 500 faces, <= 500
/// Gaussians, <= 4 views). Masks of the target carry a little label noise.
SyntheticScene make_random_lift_scene(uint64_t seed, int size = 64);

/// Outdoor scene with a table (label "table") on a floor, sky with sun.
SyntheticScene make_table_scene(int views = 3, int width = 96, int height = 72, uint64_t seed = 7);

/// Closed room seen from inside with one ceiling light quad whose pixels are
/// saturated in every frame. target_faces = the light quad's faces.
SyntheticScene make_room_with_light(int views = 4, int size = 64);

/// Large gray floor under a dim sky with a strong sun, one camera looking
/// obliquely at the origin. No labels; objects are inserted by the caller.
SyntheticScene make_sun_floor(int size = 64);

}  // namespace vfx::demo
