#include "vfx/composite/composite.hpp"

#include "vfx/core/error.hpp"
#include "vfx/core/image_io.hpp"
#include "vfx/core/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>

namespace vfx {

std::string_view to_string(BlendMode m) { return m == BlendMode::straight ? "straight" : "premultiplied"; }

BlendMode blend_mode_for_frame(const Timeline& timeline, int frame) {
    return timeline.any_active(EffectKind::fire, frame) ? BlendMode::premultiplied : BlendMode::straight;
}

namespace {

double ratio_of(double with, double without) {
    return std::clamp(with / std::max(without, kRatioEpsilon), 0.0, kRatioMax);
}

void check_aligned(const RenderPassSet& p, int w, int h) {
    const auto same = [&](const auto& img) { return img.width() == w && img.height() == h; };
    if (!same(p.bg_with_objects) || !same(p.bg_only) || !same(p.bg_depth) || !same(p.object_color) ||
        !same(p.object_alpha) || !same(p.object_depth))
        throw Error(ErrorKind::ResolutionMismatch, "render passes do not match the frame resolution " +
                                                       std::to_string(w) + "x" + std::to_string(h));
}

}  // namespace

FloatImage shadow_ratio_map(const RenderPassSet& passes) {
    const int w = passes.bg_only.width(), h = passes.bg_only.height();
    FloatImage out(w, h, 1.0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (std::isfinite(passes.bg_depth(x, y)))
                out(x, y) = ratio_of(luminance(passes.bg_with_objects(x, y)), luminance(passes.bg_only(x, y)));
    return out;
}

ColorImage shadow_ratio_rgb(const RenderPassSet& passes) {
    const int w = passes.bg_only.width(), h = passes.bg_only.height();
    ColorImage out(w, h, Vec3::Ones());
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (std::isfinite(passes.bg_depth(x, y)))
                for (int c = 0; c < 3; ++c)
                    out(x, y)[c] = ratio_of(passes.bg_with_objects(x, y)[c], passes.bg_only(x, y)[c]);
    return out;
}

BinaryImage occlusion_mask(const FloatImage& bg_depth, const FloatImage& object_depth, double bias) {
    if (!bg_depth.same_size(object_depth)) throw Error(ErrorKind::ResolutionMismatch, "depth maps differ in size");
    BinaryImage out(bg_depth.width(), bg_depth.height(), 0);
    for (size_t i = 0; i < out.size(); ++i)
        out.pixels()[i] = bg_depth.pixels()[i] < object_depth.pixels()[i] - bias ? 1 : 0;
    return out;
}

CompositeFrame composite_frame(const Rgb8Image& base, const RenderPassSet& passes, BlendMode mode,
                               const CompositeOptions& options) {
    const int w = base.width(), h = base.height();
    check_aligned(passes, w, h);
    CompositeFrame out;
    out.mode = mode;
    out.shadow_ratio = shadow_ratio_map(passes);
    const ColorImage rgb_ratio = options.per_channel_ratio ? shadow_ratio_rgb(passes) : ColorImage();
    out.occlusion = occlusion_mask(passes.bg_depth, passes.object_depth);
    out.fg_mask = BinaryImage(w, h, 0);
    out.color = base;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double a = passes.object_alpha(x, y);
            const bool visible = a > 0 && !out.occlusion(x, y);
            out.fg_mask(x, y) = a > 0 ? 1 : 0;
            const Vec3 ratio = options.per_channel_ratio ? rgb_ratio(x, y) : Vec3::Constant(out.shadow_ratio(x, y));
            if (!visible && (ratio.array() == 1.0).all()) continue;
            Vec3 c = decode_srgb(base(x, y)).cwiseProduct(ratio);
            if (visible) {
                const Vec3& premult = passes.object_color(x, y);
                if (mode == BlendMode::premultiplied)
                    c = premult + (1 - a) * c;
                else
                    c = a * (premult / a) + (1 - a) * c;
            }
            out.color(x, y) = encode_srgb(c);
        }
    return out;
}

Rgb8Image fill_removed(const Rgb8Image& base, const BinaryImage& mask, const RenderPassSet& passes) {
    check_aligned(passes, base.width(), base.height());
    double frame_sum = 0, render_sum = 0;
    for (int y = 0; y < base.height(); ++y)
        for (int x = 0; x < base.width(); ++x)
            if (!mask(x, y) && std::isfinite(passes.bg_depth(x, y))) {
                frame_sum += luminance(decode_srgb(base(x, y)));
                render_sum += luminance(passes.bg_only(x, y));
            }
    const double gain = render_sum > 0 ? frame_sum / render_sum : 1.0;
    Rgb8Image out = base;
    for (int y = 0; y < base.height(); ++y)
        for (int x = 0; x < base.width(); ++x)
            if (mask(x, y)) out(x, y) = encode_srgb(Vec3(gain * passes.bg_only(x, y)));
    return out;
}

void assemble_sequence(const std::vector<CompositeFrame>& frames, const std::string& out_dir, double fps) {
    if (frames.empty()) throw Error(ErrorKind::PreconditionFailed, "no frames to assemble");
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw Error(ErrorKind::IoError, "cannot create " + out_dir + ": " + ec.message());
    nlohmann::json modes = nlohmann::json::array();
    for (size_t i = 0; i < frames.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "%04zu.png", i);
        write_png_rgb8((std::filesystem::path(out_dir) / name).string(), frames[i].color);
        modes.push_back(std::string(to_string(frames[i].mode)));
    }
    const nlohmann::json manifest = {{"frame_count", frames.size()}, {"fps", fps}, {"mode_per_frame", modes}};
    write_text_file((std::filesystem::path(out_dir) / "manifest.json").string(), manifest.dump(2) + "\n");
}

}  // namespace vfx
