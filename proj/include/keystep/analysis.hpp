#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "keystep/features.hpp"
#include "keystep/selector.hpp"

namespace keystep {

/// Codes for the frames of `range`. `external` (one code per dataset frame) is used
/// for whole-frame queries when present; regional queries always use the descriptor.
std::vector<LatentCode> range_codes(const Dataset& dataset, const FocusRange& range,
                                    const std::optional<Region>& region, std::span<const LatentCode> external = {},
                                    const DescriptorConfig& cfg = {});

/// Validates `params` against `dataset`, builds the cost inputs and runs the DP.
SelectionResult select(const Dataset& dataset, const SelectionParams& params,
                       std::span<const LatentCode> external = {});

/// Salient frames first, then their +-1, +-2, ... neighbours breadth-first,
/// deduplicated and clipped to `range`; covers the whole range.
std::vector<std::size_t> preload_order(std::span<const std::size_t> salient, const FocusRange& range);

}  // namespace keystep
