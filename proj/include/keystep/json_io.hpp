#pragma once

#include "json.hpp"
#include "keystep/embedding.hpp"
#include "keystep/evaluate.hpp"
#include "keystep/selector.hpp"

namespace keystep {

using Json = nlohmann::json;

/// Finite numbers as-is, NaN and infinities as null.
Json number_or_null(double v);

Json to_json(const Region& region);
Json to_json(const FocusRange& range);
Json to_json(const SelectionParams& params);
Json to_json(const SelectionResult& result);
Json to_json(const EvalReport& report);
Json to_json(const EmbeddedPoint& point);
/// id, variable, width, height, t, extent, time span.
Json describe(const Dataset& dataset);

/// Region from "x0,y0,x1,y1", [x0,y0,x1,y1] or {"x0":..}. Throws ConstraintError.
Region region_from_json(const Json& j);
Region parse_region(const std::string& text);
/// FocusRange from "a:b", [a,b] or {"start":a,"end":b}. Throws ConstraintError.
FocusRange range_from_json(const Json& j);
FocusRange parse_range(const std::string& text);

/// Request body of a selection. Missing range means the whole dataset.
SelectionParams params_from_json(const Json& body, std::size_t frame_count);

}  // namespace keystep
