#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "keystep/grid.hpp"

namespace keystep {

enum class Colormap { Viridis, Gray };

Colormap parse_colormap(const std::string& name);

using Rgb = std::array<std::uint8_t, 3>;
Rgb colormap_lookup(Colormap cmap, std::uint8_t index);

/// RGBA8 pixels for `frame`: values mapped linearly from [vmin, vmax] onto the
/// lookup table (clamped), NaN fully transparent.
std::vector<std::uint8_t> colorize(const GridFrame& frame, double vmin, double vmax, Colormap cmap);

/// PNG (8-bit RGBA, no interlace) of `rgba` sized width x height.
std::string encode_png(const std::vector<std::uint8_t>& rgba, std::size_t width, std::size_t height);

/// Decoded RGBA8 pixels; used by tests and tools.
struct DecodedImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> rgba;
};
DecodedImage decode_png(const std::string& data);

}  // namespace keystep
