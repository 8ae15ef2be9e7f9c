#include "vseg/image_io.hpp"

#include <png.h>

#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <vector>

namespace vseg {

namespace {

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    in.seekg(0, std::ios::end);
    auto size = in.tellg();
    in.seekg(0, std::ios::beg);
    std::vector<std::uint8_t> buf(static_cast<std::size_t>(size));
    if (size > 0) in.read(reinterpret_cast<char*>(buf.data()), size);
    if (!in) throw IoError("cannot read file: " + path);
    return buf;
}

// ---------------------------------------------------------------------------
// PNM (binary P5/P6)
// ---------------------------------------------------------------------------

struct PnmCursor {
    const std::vector<std::uint8_t>& buf;
    std::size_t pos = 0;

    bool eof() const { return pos >= buf.size(); }
    std::uint8_t peek() const { return buf[pos]; }

    void skip_space_and_comments() {
        while (!eof()) {
            std::uint8_t c = buf[pos];
            if (c == '#') {
                while (!eof() && buf[pos] != '\n') ++pos;
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                ++pos;
            } else {
                break;
            }
        }
    }

    int read_int(const std::string& what) {
        skip_space_and_comments();
        if (eof() || buf[pos] < '0' || buf[pos] > '9')
            throw DecodeError("PNM: expected " + what, pos);
        long v = 0;
        while (!eof() && buf[pos] >= '0' && buf[pos] <= '9') {
            v = v * 10 + (buf[pos] - '0');
            if (v > 1 << 30) throw DecodeError("PNM: " + what + " out of range", pos);
            ++pos;
        }
        return static_cast<int>(v);
    }
};

bool is_pnm(const std::vector<std::uint8_t>& buf) {
    return buf.size() >= 2 && buf[0] == 'P' && (buf[1] == '5' || buf[1] == '6');
}

FundusImage decode_pnm(const std::vector<std::uint8_t>& buf) {
    PnmCursor cur{buf};
    if (buf.size() < 2) throw DecodeError("PNM: truncated header", buf.size());
    int channels = buf[1] == '6' ? 3 : 1;
    cur.pos = 2;
    int w = cur.read_int("width");
    int h = cur.read_int("height");
    int maxval = cur.read_int("maxval");
    if (w <= 0 || h <= 0) throw DecodeError("PNM: non-positive dimensions", cur.pos);
    if (maxval <= 0 || maxval > 255) throw DecodeError("PNM: unsupported maxval", cur.pos);
    if (cur.eof()) throw DecodeError("PNM: missing pixel data", cur.pos);
    ++cur.pos;  // single whitespace byte after maxval

    std::size_t need = std::size_t(w) * h * channels;
    if (buf.size() - cur.pos < need)
        throw DecodeError("PNM: truncated pixel data", buf.size());

    FundusImage img(w, h);
    const std::uint8_t* src = buf.data() + cur.pos;
    if (channels == 3) {
        std::memcpy(img.data.data(), src, need);
    } else {
        for (std::size_t i = 0; i < std::size_t(w) * h; ++i) {
            img.data[i * 3 + 0] = src[i];
            img.data[i * 3 + 1] = src[i];
            img.data[i * 3 + 2] = src[i];
        }
    }
    return img;
}

// ---------------------------------------------------------------------------
// PNG via libpng
// ---------------------------------------------------------------------------

struct PngMemReader {
    const std::uint8_t* data;
    std::size_t size;
    std::size_t pos;
};

void png_mem_read(png_structp png, png_bytep out, png_size_t n) {
    auto* r = static_cast<PngMemReader*>(png_get_io_ptr(png));
    if (r->pos + n > r->size) {
        png_error(png, "read past end of buffer");
        return;
    }
    std::memcpy(out, r->data + r->pos, n);
    r->pos += n;
}

bool is_png(const std::vector<std::uint8_t>& buf) {
    return buf.size() >= 8 && png_sig_cmp(buf.data(), 0, 8) == 0;
}

FundusImage decode_png(const std::vector<std::uint8_t>& buf) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw DecodeError("PNG: cannot allocate decoder", 0);
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw DecodeError("PNG: cannot allocate info", 0);
    }

    PngMemReader reader{buf.data(), buf.size(), 0};
    std::size_t fail_pos = 0;
    if (setjmp(png_jmpbuf(png))) {
        fail_pos = reader.pos;
        png_destroy_read_struct(&png, &info, nullptr);
        throw DecodeError("PNG: malformed stream", fail_pos);
    }

    png_set_read_fn(png, &reader, png_mem_read);
    png_read_info(png, info);

    png_uint_32 w = png_get_image_width(png, info);
    png_uint_32 h = png_get_image_height(png, info);
    int color = png_get_color_type(png, info);
    int depth = png_get_bit_depth(png, info);

    // Normalize everything to 8-bit RGB.
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (depth == 16) png_set_strip_16(png);
    png_set_strip_alpha(png);
    if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA)
        png_set_gray_to_rgb(png);
    png_read_update_info(png, info);

    FundusImage img(static_cast<int>(w), static_cast<int>(h));
    std::vector<png_bytep> rows(h);
    for (png_uint_32 y = 0; y < h; ++y)
        rows[y] = img.data.data() + std::size_t(y) * w * 3;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

void write_png(const std::string& path, const std::uint8_t* pixels, int w, int h, int channels) {
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw IoError("cannot open file for writing: " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
        std::fclose(fp);
        throw IoError("PNG: cannot allocate encoder");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        std::fclose(fp);
        throw IoError("PNG: write failed: " + path);
    }

    png_init_io(png, fp);
    int color = channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY;
    png_set_IHDR(png, info, w, h, 8, color, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<png_bytep> rows(h);
    for (int y = 0; y < h; ++y)
        rows[y] = const_cast<png_bytep>(pixels + std::size_t(y) * w * channels);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
}

}  // namespace

FundusImage load_image(const std::string& path) {
    auto buf = read_file(path);
    if (is_png(buf)) return decode_png(buf);
    if (is_pnm(buf)) return decode_pnm(buf);
    throw DecodeError("unsupported raster format (want PNG or binary PPM/PGM): " + path, 0);
}

BinaryMask load_mask(const std::string& path, int threshold) {
    FundusImage img = load_image(path);
    BinaryMask mask(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            mask.set(x, y, img.at(x, y, 0) > threshold);
    return mask;
}

void save_image(const FundusImage& img, const std::string& path) {
    write_png(path, img.data.data(), img.width, img.height, 3);
}

void save_gray_png(const GrayImage& img, const std::string& path) {
    std::vector<std::uint8_t> bytes(img.data.size());
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        float v = img.data[i];
        v = v < 0.f ? 0.f : (v > 1.f ? 1.f : v);
        bytes[i] = static_cast<std::uint8_t>(v * 255.f + 0.5f);
    }
    write_png(path, bytes.data(), img.width, img.height, 1);
}

void save_gray8_png(const std::vector<std::uint8_t>& pixels, int width, int height,
                    const std::string& path) {
    if (pixels.size() != std::size_t(width) * height)
        throw ShapeError("save_gray8_png: pixel count does not match dimensions");
    write_png(path, pixels.data(), width, height, 1);
}

void save_class_map_png(const ClassMap& map, const std::string& path) {
    std::vector<std::uint8_t> bytes(map.data.size());
    for (std::size_t i = 0; i < map.data.size(); ++i)
        bytes[i] = static_cast<std::uint8_t>(map.data[i] * 60);
    write_png(path, bytes.data(), map.width, map.height, 1);
}

ClassMap load_class_map_png(const std::string& path) {
    FundusImage img = load_image(path);
    ClassMap map(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            int v = img.at(x, y, 0);
            if (v % 60 != 0 || v / 60 >= kClassCount)
                throw ValidationError("class-map PNG has level " + std::to_string(v) +
                                      " outside {0,60,120,180,240}: " + path);
            map.set(x, y, static_cast<std::uint8_t>(v / 60));
        }
    return map;
}

}  // namespace vseg
