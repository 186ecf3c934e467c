#include "keystep/render.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstring>

#include "keystep/error.hpp"

namespace keystep {

namespace {

constexpr std::uint8_t kViridis[256][3] = {
#include "viridis_table.inc"
};

void png_append(png_structp png, png_bytep data, png_size_t length) {
    auto* out = static_cast<std::string*>(png_get_io_ptr(png));
    out->append(reinterpret_cast<const char*>(data), length);
}

void png_flush(png_structp) {}

struct ReadCursor {
    const std::string* data;
    std::size_t pos;
};

void png_consume(png_structp png, png_bytep out, png_size_t length) {
    auto* cur = static_cast<ReadCursor*>(png_get_io_ptr(png));
    if (cur->pos + length > cur->data->size()) png_error(png, "truncated PNG");
    std::memcpy(out, cur->data->data() + cur->pos, length);
    cur->pos += length;
}

}  // namespace

Colormap parse_colormap(const std::string& name) {
    if (name.empty() || name == "viridis") return Colormap::Viridis;
    if (name == "gray" || name == "grey") return Colormap::Gray;
    throw ConstraintError("unknown colormap '" + name + "'", {"cmap"});
}

Rgb colormap_lookup(Colormap cmap, std::uint8_t index) {
    if (cmap == Colormap::Gray) return {index, index, index};
    return {kViridis[index][0], kViridis[index][1], kViridis[index][2]};
}

std::vector<std::uint8_t> colorize(const GridFrame& frame, double vmin, double vmax, Colormap cmap) {
    std::vector<std::uint8_t> rgba(frame.size() * 4, 0);
    const double span = vmax - vmin;
    for (std::size_t i = 0; i < frame.size(); ++i) {
        const double v = frame.values[i];
        if (std::isnan(v)) continue;
        const double u = span > 0.0 ? std::clamp((v - vmin) / span, 0.0, 1.0) : 0.0;
        const auto c = colormap_lookup(cmap, static_cast<std::uint8_t>(std::lround(u * 255.0)));
        rgba[4 * i + 0] = c[0];
        rgba[4 * i + 1] = c[1];
        rgba[4 * i + 2] = c[2];
        rgba[4 * i + 3] = 255;
    }
    return rgba;
}

std::string encode_png(const std::vector<std::uint8_t>& rgba, std::size_t width, std::size_t height) {
    if (rgba.size() != width * height * 4) throw FormatError("RGBA buffer size does not match image size");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    std::string out;
    if (!info || setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, info ? &info : nullptr);
        throw IoError("PNG encoding failed");
    }
    png_set_write_fn(png, &out, png_append, png_flush);
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8,
                 PNG_COLOR_TYPE_RGBA, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (std::size_t y = 0; y < height; ++y) {
        png_write_row(png, const_cast<png_bytep>(rgba.data() + y * width * 4));
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return out;
}

DecodedImage decode_png(const std::string& data) {
    if (data.size() < 8 || png_sig_cmp(reinterpret_cast<png_const_bytep>(data.data()), 0, 8) != 0) {
        throw FormatError("not a PNG stream");
    }
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    DecodedImage img;
    ReadCursor cursor{&data, 0};
    if (!info || setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        throw FormatError("PNG decoding failed");
    }
    png_set_read_fn(png, &cursor, png_consume);
    png_read_info(png, info);
    png_set_expand(png);
    png_set_strip_16(png);
    png_set_gray_to_rgb(png);
    png_set_add_alpha(png, 0xFF, PNG_FILLER_AFTER);
    png_read_update_info(png, info);
    img.width = png_get_image_width(png, info);
    img.height = png_get_image_height(png, info);
    img.rgba.resize(img.width * img.height * 4);
    for (std::size_t y = 0; y < img.height; ++y) png_read_row(png, img.rgba.data() + y * img.width * 4, nullptr);
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

}  // namespace keystep
