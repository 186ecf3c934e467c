#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace keystep {

/// One time step: a row-major scalar field. Cells may be NaN (missing data).
struct GridFrame {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<double> values;

    GridFrame() = default;
    GridFrame(std::size_t w, std::size_t h, double fill = 0.0);
    /// Throws BoundsError on zero dimensions, FormatError if `v.size() != w * h`.
    GridFrame(std::size_t w, std::size_t h, std::vector<double> v);

    std::size_t size() const noexcept { return values.size(); }
    double at(std::size_t x, std::size_t y) const { return values[y * width + x]; }
    double& at(std::size_t x, std::size_t y) { return values[y * width + x]; }

    friend bool operator==(const GridFrame&, const GridFrame&);
};

struct NormStats {
    double vmin = 0.0;
    double vmax = 0.0;
    friend bool operator==(const NormStats&, const NormStats&) = default;
};

/// Inclusive pixel window.
struct Region {
    std::size_t x0 = 0, y0 = 0, x1 = 0, y1 = 0;

    static Region full(std::size_t width, std::size_t height) { return {0, 0, width - 1, height - 1}; }
    std::size_t width() const noexcept { return x1 - x0 + 1; }
    std::size_t height() const noexcept { return y1 - y0 + 1; }
    bool is_full(std::size_t w, std::size_t h) const noexcept {
        return x0 == 0 && y0 == 0 && x1 + 1 == w && y1 + 1 == h;
    }
    friend bool operator==(const Region&, const Region&) = default;
};

void validate_region(const Region& region, std::size_t width, std::size_t height);

/// Inclusive frame-index interval; at least two frames long.
struct FocusRange {
    std::size_t start = 0;
    std::size_t end = 0;

    std::size_t length() const noexcept { return end - start + 1; }
    bool contains(std::size_t t) const noexcept { return t >= start && t <= end; }
    friend bool operator==(const FocusRange&, const FocusRange&) = default;
};

void validate_range(const FocusRange& range, std::size_t frame_count);

/// Geographic bounding box in degrees, mapped linearly onto the pixel grid.
struct GeoExtent {
    double lon0 = 0.0, lat0 = 0.0, lon1 = 0.0, lat1 = 0.0;
    friend bool operator==(const GeoExtent&, const GeoExtent&) = default;
};

struct Dataset {
    std::string id;
    std::string variable;
    std::vector<GridFrame> frames;
    std::vector<std::string> timestamps;  // ISO-8601, strictly increasing
    GeoExtent extent;
    NormStats norm;

    std::size_t size() const noexcept { return frames.size(); }
    std::size_t width() const noexcept { return frames.empty() ? 0 : frames.front().width; }
    std::size_t height() const noexcept { return frames.empty() ? 0 : frames.front().height; }
    FocusRange full_range() const { return {0, frames.empty() ? 0 : frames.size() - 1}; }
    Region full_region() const { return Region::full(width(), height()); }

    friend bool operator==(const Dataset&, const Dataset&);
};

/// Validates the dataset invariants and computes NormStats.
/// Throws FormatError on inconsistent frames/timestamps, EmptyDataError if all cells are NaN.
Dataset make_dataset(std::string id, std::string variable, std::vector<GridFrame> frames,
                     std::vector<std::string> timestamps, GeoExtent extent = {});

/// Seconds since the Unix epoch for `YYYY-MM-DD[THH:MM[:SS[.fff]]][Z|+HH:MM|-HH:MM]`.
double parse_iso8601(const std::string& text);
std::string format_iso8601(double epoch_seconds);

NormStats compute_norm(const std::vector<GridFrame>& frames);

GridFrame crop(const GridFrame& frame, const Region& region);
GridFrame normalize(const GridFrame& frame, const NormStats& norm);
GridFrame denormalize(const GridFrame& frame, const NormStats& norm);
GridFrame fill_nan(const GridFrame& frame, double fill = 0.0);

/// crop + normalize + fill_nan(0): the form consumed by descriptors and metrics.
GridFrame prepare(const GridFrame& frame, const NormStats& norm, const std::optional<Region>& region);

/// nan-aware summary of one frame; all fields NaN when no finite cell exists.
struct FrameSummary {
    double min;
    double max;
    double mean;
    std::size_t valid;
};
FrameSummary summarize(const GridFrame& frame);

}  // namespace keystep
