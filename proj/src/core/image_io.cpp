#include "vfx/core/image_io.hpp"

#include "vfx/core/error.hpp"

#include <png.h>

#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <vector>

namespace vfx {

namespace {

struct FileCloser {
    void operator()(FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

FilePtr open_file(const std::string& path, const char* mode) {
    FilePtr f(std::fopen(path.c_str(), mode));
    if (!f) {
        if (mode[0] == 'r') throw Error(ErrorKind::MissingFile, path);
        throw Error(ErrorKind::IoError, "cannot open " + path + " for writing");
    }
    return f;
}

[[noreturn]] void png_error_fn(png_structp png, png_const_charp msg) {
    auto* where = static_cast<std::string*>(png_get_error_ptr(png));
    *where = msg;
    png_longjmp(png, 1);
}

void png_warning_fn(png_structp, png_const_charp) {}

// Reads rows after transformations; `configure` installs the transforms.
template <class Configure>
std::vector<uint8_t> read_png_rows(const std::string& path, int& width, int& height,
                                   size_t& row_bytes, int& bit_depth, int& color_type,
                                   Configure configure) {
    FilePtr f = open_file(path, "rb");
    unsigned char sig[8];
    if (std::fread(sig, 1, 8, f.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0)
        throw Error(ErrorKind::MalformedRecord, path + ": not a PNG file");

    std::string err;
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, png_error_fn,
                                             png_warning_fn);
    png_infop info = png_create_info_struct(png);
    std::vector<uint8_t> data;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error(ErrorKind::MalformedRecord, path + ": " + err);
    }
    png_init_io(png, f.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);
    bit_depth = png_get_bit_depth(png, info);
    color_type = png_get_color_type(png, info);
    configure(png, info, bit_depth, color_type);
    png_read_update_info(png, info);
    width = static_cast<int>(png_get_image_width(png, info));
    height = static_cast<int>(png_get_image_height(png, info));
    row_bytes = png_get_rowbytes(png, info);
    data.resize(row_bytes * height);
    rows.resize(height);
    for (int y = 0; y < height; ++y) rows[y] = data.data() + row_bytes * y;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return data;
}

// Writes to `file` when given, otherwise appends the encoded bytes to `memory`.
void write_png_rows_to(FILE* file, std::string* memory, const std::string& what, int width, int height,
                       int bit_depth, int color_type, const std::vector<uint8_t>& data, size_t row_bytes) {
    std::string err;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, png_error_fn,
                                              png_warning_fn);
    png_infop info = png_create_info_struct(png);
    std::vector<png_bytep> rows(height);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw Error(ErrorKind::IoError, what + ": " + err);
    }
    if (file) {
        png_init_io(png, file);
    } else {
        png_set_write_fn(
            png, memory,
            [](png_structp p, png_bytep bytes, png_size_t n) {
                static_cast<std::string*>(png_get_io_ptr(p))->append(reinterpret_cast<const char*>(bytes), n);
            },
            nullptr);
    }
    png_set_compression_level(png, 6);
    png_set_IHDR(png, info, width, height, bit_depth, color_type, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < height; ++y)
        rows[y] = const_cast<png_bytep>(data.data() + row_bytes * y);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

void write_png_rows(const std::string& path, int width, int height, int bit_depth,
                    int color_type, const std::vector<uint8_t>& data, size_t row_bytes) {
    FilePtr f = open_file(path, "wb");
    write_png_rows_to(f.get(), nullptr, path, width, height, bit_depth, color_type, data, row_bytes);
}

std::vector<uint8_t> rgb8_rows(const Rgb8Image& img) {
    const size_t row_bytes = static_cast<size_t>(img.width()) * 3;
    std::vector<uint8_t> data(row_bytes * img.height());
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) {
            uint8_t* p = data.data() + row_bytes * y + 3 * x;
            p[0] = img(x, y).r;
            p[1] = img(x, y).g;
            p[2] = img(x, y).b;
        }
    return data;
}

}  // namespace

Rgb8Image read_png_rgb8(const std::string& path) {
    int w = 0, h = 0, depth = 0, type = 0;
    size_t row_bytes = 0;
    auto data = read_png_rows(path, w, h, row_bytes, depth, type,
                              [](png_structp png, png_infop, int bit_depth, int color_type) {
                                  if (bit_depth == 16) png_set_strip_16(png);
                                  if (color_type == PNG_COLOR_TYPE_PALETTE)
                                      png_set_palette_to_rgb(png);
                                  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8)
                                      png_set_expand_gray_1_2_4_to_8(png);
                                  if (color_type == PNG_COLOR_TYPE_GRAY ||
                                      color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
                                      png_set_gray_to_rgb(png);
                                  if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
                              });
    if (row_bytes != static_cast<size_t>(w) * 3)
        throw Error(ErrorKind::MalformedRecord, path + ": unsupported PNG layout");
    Rgb8Image img(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const uint8_t* p = data.data() + row_bytes * y + 3 * x;
            img(x, y) = {p[0], p[1], p[2]};
        }
    return img;
}

void write_png_rgb8(const std::string& path, const Rgb8Image& img) {
    write_png_rows(path, img.width(), img.height(), 8, PNG_COLOR_TYPE_RGB, rgb8_rows(img),
                   static_cast<size_t>(img.width()) * 3);
}

std::string encode_png_rgb8(const Rgb8Image& img) {
    std::string out;
    write_png_rows_to(nullptr, &out, "in-memory PNG", img.width(), img.height(), 8, PNG_COLOR_TYPE_RGB,
                      rgb8_rows(img), static_cast<size_t>(img.width()) * 3);
    return out;
}

MaskImage read_png_u16(const std::string& path) {
    int w = 0, h = 0, depth = 0, type = 0;
    size_t row_bytes = 0;
    auto data = read_png_rows(path, w, h, row_bytes, depth, type,
                              [&path](png_structp, png_infop, int, int color_type) {
                                  if (color_type != PNG_COLOR_TYPE_GRAY)
                                      throw Error(ErrorKind::MalformedRecord,
                                                  path + ": mask must be single-channel");
                              });
    MaskImage img(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const uint8_t* row = data.data() + row_bytes * y;
            // PNG stores 16-bit samples big-endian.
            img(x, y) = depth == 16 ? static_cast<uint16_t>((row[2 * x] << 8) | row[2 * x + 1])
                                    : row[x];
        }
    return img;
}

void write_png_u16(const std::string& path, const MaskImage& img) {
    const size_t row_bytes = static_cast<size_t>(img.width()) * 2;
    std::vector<uint8_t> data(row_bytes * img.height());
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) {
            uint8_t* p = data.data() + row_bytes * y + 2 * x;
            p[0] = static_cast<uint8_t>(img(x, y) >> 8);
            p[1] = static_cast<uint8_t>(img(x, y) & 0xff);
        }
    write_png_rows(path, img.width(), img.height(), 16, PNG_COLOR_TYPE_GRAY, data, row_bytes);
}

namespace {

struct PfmData {
    int width = 0, height = 0, channels = 0;
    std::vector<float> values;  // top-to-bottom rows
};

PfmData read_pfm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::MissingFile, path);
    std::string magic;
    double scale = 0;
    PfmData d;
    in >> magic >> d.width >> d.height >> scale;
    if (!in || (magic != "PF" && magic != "Pf") || d.width <= 0 || d.height <= 0)
        throw Error(ErrorKind::MalformedRecord, path + ": bad PFM header");
    in.get();  // single whitespace after the scale
    d.channels = magic == "PF" ? 3 : 1;
    const bool little = scale < 0;
    const size_t row = static_cast<size_t>(d.width) * d.channels;
    d.values.resize(row * d.height);
    std::vector<uint8_t> raw(row * 4);
    for (int y = d.height - 1; y >= 0; --y) {
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
        if (!in) throw Error(ErrorKind::MalformedRecord, path + ": truncated PFM data");
        for (size_t i = 0; i < row; ++i) {
            uint8_t* b = raw.data() + 4 * i;
            if (!little) {
                std::swap(b[0], b[3]);
                std::swap(b[1], b[2]);
            }
            float v;
            std::memcpy(&v, b, 4);
            d.values[row * y + i] = v;
        }
    }
    return d;
}

void write_pfm(const std::string& path, int width, int height, int channels,
               const std::vector<float>& values) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::IoError, "cannot write " + path);
    out << (channels == 3 ? "PF" : "Pf") << "\n" << width << " " << height << "\n-1.0\n";
    const size_t row = static_cast<size_t>(width) * channels;
    for (int y = height - 1; y >= 0; --y)
        out.write(reinterpret_cast<const char*>(values.data() + row * y),
                  static_cast<std::streamsize>(row * 4));
    if (!out) throw Error(ErrorKind::IoError, "short write " + path);
}

}  // namespace

ColorImage read_pfm_color(const std::string& path) {
    PfmData d = read_pfm(path);
    ColorImage img(d.width, d.height);
    for (size_t i = 0; i < img.size(); ++i) {
        if (d.channels == 3)
            img.pixels()[i] = Vec3(d.values[3 * i], d.values[3 * i + 1], d.values[3 * i + 2]);
        else
            img.pixels()[i] = Vec3::Constant(d.values[i]);
    }
    return img;
}

void write_pfm_color(const std::string& path, const ColorImage& img) {
    std::vector<float> v(img.size() * 3);
    for (size_t i = 0; i < img.size(); ++i)
        for (int c = 0; c < 3; ++c) v[3 * i + c] = static_cast<float>(img.pixels()[i][c]);
    write_pfm(path, img.width(), img.height(), 3, v);
}

FloatImage read_pfm_gray(const std::string& path) {
    PfmData d = read_pfm(path);
    FloatImage img(d.width, d.height);
    for (size_t i = 0; i < img.size(); ++i) img.pixels()[i] = d.values[i * d.channels];
    return img;
}

void write_pfm_gray(const std::string& path, const FloatImage& img) {
    std::vector<float> v(img.size());
    for (size_t i = 0; i < img.size(); ++i) v[i] = static_cast<float>(img.pixels()[i]);
    write_pfm(path, img.width(), img.height(), 1, v);
}

}  // namespace vfx
