#pragma once

#include "vfx/core/image.hpp"

#include <string>

namespace vfx {

// PNG: 8-bit RGB color frames and 16-bit single-channel instance masks.
Rgb8Image read_png_rgb8(const std::string& path);
void write_png_rgb8(const std::string& path, const Rgb8Image& img);
std::string encode_png_rgb8(const Rgb8Image& img);  // PNG file bytes
MaskImage read_png_u16(const std::string& path);
void write_png_u16(const std::string& path, const MaskImage& img);

// Portable float map, little-endian. Color ("PF") and grayscale ("Pf").
// Rows are stored bottom-to-top per the format; images here are top-to-bottom.
ColorImage read_pfm_color(const std::string& path);
void write_pfm_color(const std::string& path, const ColorImage& img);
FloatImage read_pfm_gray(const std::string& path);
void write_pfm_gray(const std::string& path, const FloatImage& img);

}  // namespace vfx
