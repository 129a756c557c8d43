#pragma once

#include "vfx/core/math.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace vfx {

template <class T>
class Image {
public:
    Image() = default;
    Image(int width, int height, const T& fill = T{})
        : width_(width), height_(height), data_(static_cast<size_t>(width) * height, fill) {}

    int width() const { return width_; }
    int height() const { return height_; }
    size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    T& operator()(int x, int y) { return data_[static_cast<size_t>(y) * width_ + x]; }
    const T& operator()(int x, int y) const { return data_[static_cast<size_t>(y) * width_ + x]; }

    std::span<T> pixels() { return data_; }
    std::span<const T> pixels() const { return data_; }

    template <class U>
    bool same_size(const Image<U>& other) const {
        return width_ == other.width() && height_ == other.height();
    }

    friend bool operator==(const Image& a, const Image& b) {
        return a.width_ == b.width_ && a.height_ == b.height_ && a.data_ == b.data_;
    }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

struct Rgb8 {
    uint8_t r = 0, g = 0, b = 0;
    friend bool operator==(const Rgb8&, const Rgb8&) = default;
};

using ColorImage = Image<Vec3>;
using FloatImage = Image<double>;
using MaskImage = Image<uint16_t>;
using Rgb8Image = Image<Rgb8>;
using BinaryImage = Image<uint8_t>;

/// sRGB 8-bit code to linear value.
double srgb_to_linear(uint8_t code);
/// Linear value to sRGB 8-bit code, clamped, rounding half up.
uint8_t linear_to_srgb8(double linear);

Vec3 decode_srgb(const Rgb8& c);
Rgb8 encode_srgb(const Vec3& linear);

ColorImage decode_srgb(const Rgb8Image& img);
Rgb8Image encode_srgb(const ColorImage& img);

}  // namespace vfx
