#include "vfx/core/image.hpp"

#include <array>

namespace vfx {

namespace {

double srgb_decode_exact(double v) {
    return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
}

double srgb_encode_exact(double v) {
    return v <= 0.0031308 ? 12.92 * v : 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
}

const std::array<double, 256>& decode_table() {
    static const std::array<double, 256> table = [] {
        std::array<double, 256> t{};
        for (int i = 0; i < 256; ++i) t[i] = srgb_decode_exact(i / 255.0);
        return t;
    }();
    return table;
}

}  // namespace

double srgb_to_linear(uint8_t code) { return decode_table()[code]; }

uint8_t linear_to_srgb8(double linear) {
    if (!(linear > 0.0)) return 0;
    if (linear >= 1.0) return 255;
    const double v = std::floor(srgb_encode_exact(linear) * 255.0 + 0.5);
    return static_cast<uint8_t>(std::clamp(v, 0.0, 255.0));
}

Vec3 decode_srgb(const Rgb8& c) {
    return {srgb_to_linear(c.r), srgb_to_linear(c.g), srgb_to_linear(c.b)};
}

Rgb8 encode_srgb(const Vec3& linear) {
    return {linear_to_srgb8(linear.x()), linear_to_srgb8(linear.y()), linear_to_srgb8(linear.z())};
}

ColorImage decode_srgb(const Rgb8Image& img) {
    ColorImage out(img.width(), img.height());
    for (size_t i = 0; i < img.size(); ++i) out.pixels()[i] = decode_srgb(img.pixels()[i]);
    return out;
}

Rgb8Image encode_srgb(const ColorImage& img) {
    Rgb8Image out(img.width(), img.height());
    for (size_t i = 0; i < img.size(); ++i) out.pixels()[i] = encode_srgb(img.pixels()[i]);
    return out;
}

}  // namespace vfx
