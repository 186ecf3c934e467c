#include "keystep/aggregation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include "keystep/error.hpp"

namespace keystep {

AggregationKind parse_aggregation(const std::string& name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "max") return AggregationKind::Max;
    if (lower == "min") return AggregationKind::Min;
    if (lower == "avg" || lower == "mean") return AggregationKind::Avg;
    throw ConstraintError("unknown aggregation '" + name + "' (expected max, min or avg)", {"aggregation"});
}

const char* to_string(AggregationKind kind) {
    switch (kind) {
        case AggregationKind::Max: return "max";
        case AggregationKind::Min: return "min";
        case AggregationKind::Avg: return "avg";
    }
    return "?";
}

double aggregate_frame(const GridFrame& frame, const Region& region, AggregationKind kind) {
    validate_region(region, frame.width, frame.height);
    std::size_t n = 0;
    double acc = 0.0;
    for (std::size_t y = region.y0; y <= region.y1; ++y) {
        for (std::size_t x = region.x0; x <= region.x1; ++x) {
            const double v = frame.at(x, y);
            if (std::isnan(v)) continue;
            ++n;
            switch (kind) {
                case AggregationKind::Max: acc = n == 1 ? v : std::max(acc, v); break;
                case AggregationKind::Min: acc = n == 1 ? v : std::min(acc, v); break;
                // running mean: exact for constant regions
                case AggregationKind::Avg: acc += (v - acc) / static_cast<double>(n); break;
            }
        }
    }
    return n == 0 ? std::numeric_limits<double>::quiet_NaN() : acc;
}

std::vector<double> aggregate(const Dataset& dataset, const FocusRange& range,
                              const std::optional<Region>& region, AggregationKind kind) {
    if (range.start > range.end || range.end >= dataset.size()) {
        throw BoundsError("aggregation range outside dataset", {"range"});
    }
    const Region r = region.value_or(dataset.full_region());
    validate_region(r, dataset.width(), dataset.height());
    std::vector<double> v;
    v.reserve(range.length());
    for (std::size_t t = range.start; t <= range.end; ++t) v.push_back(aggregate_frame(dataset.frames[t], r, kind));
    return v;
}

std::vector<double> normalize_series(std::span<const double> values) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double v : values) {
        if (std::isnan(v)) continue;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (lo > hi) throw EmptyDataError("aggregated series has no finite values");
    const double span = hi - lo;
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double v = values[i];
        out[i] = std::isnan(v) ? v : (span > 0.0 ? (v - lo) / span : 0.0);
    }
    return out;
}

AggregatedSeries aggregated_series(const Dataset& dataset, const FocusRange& range,
                                   const std::optional<Region>& region, AggregationKind kind) {
    AggregatedSeries s;
    s.kind = kind;
    s.region = region;
    s.values = aggregate(dataset, range, region, kind);
    s.normalized = normalize_series(s.values);
    return s;
}

double statistical_cost(double a, double b) {
    if (std::isnan(a) || std::isnan(b)) return 1.0;
    return 1.0 - std::tanh(std::abs(a - b));
}

}  // namespace keystep
