#include "keystep/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <limits>

#include "keystep/error.hpp"

namespace keystep {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool bit_equal(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() &&
           (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

// Days since 1970-01-01 for a proleptic Gregorian date.
long long days_from_civil(long long y, unsigned m, unsigned d) {
    y -= m <= 2;
    const long long era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<long long>(doe) - 719468;
}

}  // namespace

GridFrame::GridFrame(std::size_t w, std::size_t h, double fill) : width(w), height(h) {
    if (w == 0 || h == 0) throw BoundsError("frame dimensions must be at least 1x1");
    values.assign(w * h, fill);
}

GridFrame::GridFrame(std::size_t w, std::size_t h, std::vector<double> v)
    : width(w), height(h), values(std::move(v)) {
    if (w == 0 || h == 0) throw BoundsError("frame dimensions must be at least 1x1");
    if (values.size() != w * h) {
        throw FormatError("frame has " + std::to_string(values.size()) + " values, expected " +
                          std::to_string(w * h));
    }
}

bool operator==(const GridFrame& a, const GridFrame& b) {
    return a.width == b.width && a.height == b.height && bit_equal(a.values, b.values);
}

bool operator==(const Dataset& a, const Dataset& b) {
    return a.id == b.id && a.variable == b.variable && a.frames == b.frames &&
           a.timestamps == b.timestamps && a.extent == b.extent && a.norm == b.norm;
}

void validate_region(const Region& region, std::size_t width, std::size_t height) {
    if (region.x0 > region.x1 || region.y0 > region.y1 || region.x1 >= width ||
        region.y1 >= height) {
        throw BoundsError("region (" + std::to_string(region.x0) + "," + std::to_string(region.y0) +
                              "," + std::to_string(region.x1) + "," + std::to_string(region.y1) +
                              ") outside " + std::to_string(width) + "x" + std::to_string(height),
                          {"region"});
    }
}

void validate_range(const FocusRange& range, std::size_t frame_count) {
    if (range.start >= range.end || range.end >= frame_count) {
        throw BoundsError("focus range " + std::to_string(range.start) + ":" +
                              std::to_string(range.end) + " invalid for " +
                              std::to_string(frame_count) + " frames (needs start < end < t)",
                          {"range"});
    }
}

NormStats compute_norm(const std::vector<GridFrame>& frames) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& f : frames) {
        for (double v : f.values) {
            if (std::isnan(v)) continue;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (lo > hi) throw EmptyDataError("dataset contains no finite values");
    return {lo, hi};
}

Dataset make_dataset(std::string id, std::string variable, std::vector<GridFrame> frames,
                     std::vector<std::string> timestamps, GeoExtent extent) {
    if (frames.empty()) throw FormatError("dataset has no frames");
    if (timestamps.size() != frames.size()) {
        throw FormatError("timestamp count " + std::to_string(timestamps.size()) +
                          " does not match frame count " + std::to_string(frames.size()));
    }
    const auto w = frames.front().width;
    const auto h = frames.front().height;
    for (std::size_t i = 0; i < frames.size(); ++i) {
        const auto& f = frames[i];
        if (f.width != w || f.height != h || f.values.size() != w * h || w == 0 || h == 0) {
            throw FormatError("frame " + std::to_string(i) + " has inconsistent dimensions");
        }
    }
    double prev = -std::numeric_limits<double>::infinity();
    for (const auto& ts : timestamps) {
        const double t = parse_iso8601(ts);
        if (!(t > prev)) throw FormatError("timestamps not strictly increasing at '" + ts + "'");
        prev = t;
    }
    Dataset d;
    d.norm = compute_norm(frames);
    d.id = std::move(id);
    d.variable = std::move(variable);
    d.frames = std::move(frames);
    d.timestamps = std::move(timestamps);
    d.extent = extent;
    return d;
}

double parse_iso8601(const std::string& text) {
    int y = 0, mo = 0, d = 0, hh = 0, mm = 0;
    double ss = 0.0;
    int consumed = 0;
    if (std::sscanf(text.c_str(), "%4d-%2d-%2d%n", &y, &mo, &d, &consumed) != 3 ||
        consumed != 10) {
        throw FormatError("bad timestamp '" + text + "'");
    }
    std::size_t pos = 10;
    if (pos < text.size() && (text[pos] == 'T' || text[pos] == ' ')) {
        int n = 0;
        if (std::sscanf(text.c_str() + pos + 1, "%2d:%2d%n", &hh, &mm, &n) != 2 || n != 5) {
            throw FormatError("bad timestamp '" + text + "'");
        }
        pos += 1 + static_cast<std::size_t>(n);
        if (pos < text.size() && text[pos] == ':') {
            char* endp = nullptr;
            ss = std::strtod(text.c_str() + pos + 1, &endp);
            pos = static_cast<std::size_t>(endp - text.c_str());
        }
    }
    double offset = 0.0;
    if (pos < text.size()) {
        if (text[pos] == 'Z' && pos + 1 == text.size()) {
            pos += 1;
        } else if ((text[pos] == '+' || text[pos] == '-') && pos + 6 == text.size()) {
            int oh = 0, om = 0;
            if (std::sscanf(text.c_str() + pos + 1, "%2d:%2d", &oh, &om) != 2) {
                throw FormatError("bad timestamp offset '" + text + "'");
            }
            offset = (text[pos] == '+' ? 1.0 : -1.0) * (oh * 3600.0 + om * 60.0);
            pos = text.size();
        } else {
            throw FormatError("bad timestamp '" + text + "'");
        }
    }
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || hh > 23 || mm > 59 || ss < 0 || ss >= 61) {
        throw FormatError("timestamp out of range '" + text + "'");
    }
    const auto days = days_from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d));
    return static_cast<double>(days) * 86400.0 + hh * 3600.0 + mm * 60.0 + ss - offset;
}

std::string format_iso8601(double epoch_seconds) {
    const auto secs = static_cast<std::time_t>(std::floor(epoch_seconds));
    std::tm tm{};
    gmtime_r(&secs, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

GridFrame crop(const GridFrame& frame, const Region& region) {
    validate_region(region, frame.width, frame.height);
    GridFrame out(region.width(), region.height());
    for (std::size_t y = 0; y < out.height; ++y) {
        const auto* src = frame.values.data() + (region.y0 + y) * frame.width + region.x0;
        std::copy(src, src + out.width, out.values.begin() + static_cast<std::ptrdiff_t>(y * out.width));
    }
    return out;
}

GridFrame normalize(const GridFrame& frame, const NormStats& norm) {
    GridFrame out = frame;
    const double span = norm.vmax - norm.vmin;
    for (double& v : out.values) {
        if (std::isnan(v)) continue;
        v = span > 0.0 ? (v - norm.vmin) / span : 0.0;
    }
    return out;
}

GridFrame denormalize(const GridFrame& frame, const NormStats& norm) {
    GridFrame out = frame;
    const double span = norm.vmax - norm.vmin;
    for (double& v : out.values) {
        if (!std::isnan(v)) v = v * span + norm.vmin;
    }
    return out;
}

GridFrame fill_nan(const GridFrame& frame, double fill) {
    GridFrame out = frame;
    for (double& v : out.values) {
        if (std::isnan(v)) v = fill;
    }
    return out;
}

GridFrame prepare(const GridFrame& frame, const NormStats& norm, const std::optional<Region>& region) {
    if (region) return fill_nan(normalize(crop(frame, *region), norm));
    return fill_nan(normalize(frame, norm));
}

FrameSummary summarize(const GridFrame& frame) {
    FrameSummary s{kNaN, kNaN, kNaN, 0};
    double mean = 0.0;
    for (double v : frame.values) {
        if (std::isnan(v)) continue;
        ++s.valid;
        if (s.valid == 1) {
            s.min = s.max = v;
        } else {
            s.min = std::min(s.min, v);
            s.max = std::max(s.max, v);
        }
        mean += (v - mean) / static_cast<double>(s.valid);
    }
    if (s.valid > 0) s.mean = mean;
    return s;
}

}  // namespace keystep
