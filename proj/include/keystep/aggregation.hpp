#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "keystep/grid.hpp"

namespace keystep {

enum class AggregationKind { Max, Min, Avg };

AggregationKind parse_aggregation(const std::string& name);  // "max" | "min" | "avg", case-insensitive
const char* to_string(AggregationKind kind);

struct AggregatedSeries {
    AggregationKind kind = AggregationKind::Avg;
    std::optional<Region> region;     // nullopt: whole frame
    std::vector<double> values;       // v, NaN where the region is all-NaN
    std::vector<double> normalized;   // v-hat in [0, 1] or NaN
};

/// nan-aware reduction of one frame's region. NaN if no cell is finite.
double aggregate_frame(const GridFrame& frame, const Region& region, AggregationKind kind);

/// v for every step of `range`.
std::vector<double> aggregate(const Dataset& dataset, const FocusRange& range,
                              const std::optional<Region>& region, AggregationKind kind);

/// (v - nanmin) / (nanmax - nanmin); a constant series maps to 0. Throws EmptyDataError if all NaN.
std::vector<double> normalize_series(std::span<const double> values);

AggregatedSeries aggregated_series(const Dataset& dataset, const FocusRange& range,
                                   const std::optional<Region>& region, AggregationKind kind);

/// 1 - tanh(|a - b|); 1 when either side is NaN.
double statistical_cost(double a, double b);

}  // namespace keystep
