#pragma once

// Analytic shadow classification for an axis-aligned box resting on the z = 0
// plane under a directional sun. Uses slab tests only.

#include "vfx/core/image.hpp"
#include "vfx/scene/camera.hpp"

namespace oracle {

enum : uint8_t { kLitFloor = 0, kShadowFloor = 1, kUnclassified = 2 };

/// Per output pixel: lit floor, shadowed floor, or unclassified (sky, box,
/// mixed sub-samples, or within `band` pixels of a mixed pixel). Lit floor
/// closer than `lit_margin` (horizontally) to the box footprint is left
/// unclassified, since light bounced off the box brightens it.
vfx::MaskImage classify_box_shadow(const vfx::CameraView& cam, const vfx::Vec3& box_lo, const vfx::Vec3& box_hi,
                                   const vfx::Vec3& sun_direction, double lit_margin = 0.0, int subsamples = 4,
                                   int band = 1);

}  // namespace oracle
