#pragma once

#include "vfx/render/raytracer.hpp"

#include <string>
#include <vector>

namespace vfx {

inline constexpr double kRatioEpsilon = 1e-4;
inline constexpr double kRatioMax = 4.0;
inline constexpr double kDepthBias = 1e-3;

enum class BlendMode { straight, premultiplied };
std::string_view to_string(BlendMode m);

/// Premultiplied while a fire event is active (emissive, transparent content).
BlendMode blend_mode_for_frame(const Timeline& timeline, int frame);

/// lum(bg_with_objects) / max(lum(bg_only), eps), clamped to [0, 4]; 1 where
/// the background is empty.
FloatImage shadow_ratio_map(const RenderPassSet& passes);
/// Per-channel variant of the same quotient.
ColorImage shadow_ratio_rgb(const RenderPassSet& passes);

/// 1 where the background is nearer than the object by more than `bias`.
BinaryImage occlusion_mask(const FloatImage& bg_depth, const FloatImage& object_depth, double bias = kDepthBias);

struct CompositeOptions {
    bool per_channel_ratio = false;
};

struct CompositeFrame {
    Rgb8Image color;
    FloatImage shadow_ratio;
    BinaryImage fg_mask;
    BinaryImage occlusion;
    BlendMode mode = BlendMode::straight;
};

/// Modulates the decoded base by the shadow ratio, blends visible object
/// pixels over it, and re-encodes. Pixels with ratio 1 and no object coverage
/// keep their base code. Throws ResolutionMismatch.
CompositeFrame composite_frame(const Rgb8Image& base, const RenderPassSet& passes, BlendMode mode,
                               const CompositeOptions& options = {});

/// Replaces `mask` pixels of the base frame with the background-only render,
/// scaled so its mean luminance over the untouched background pixels matches
/// the frame. Used where removed or moved content leaves a hole in the video.
Rgb8Image fill_removed(const Rgb8Image& base, const BinaryImage& mask, const RenderPassSet& passes);

/// Writes NNNN.png per frame and manifest.json {frame_count, fps, mode_per_frame}.
/// Throws IoError, or PreconditionFailed for an empty sequence.
void assemble_sequence(const std::vector<CompositeFrame>& frames, const std::string& out_dir, double fps);

}  // namespace vfx
