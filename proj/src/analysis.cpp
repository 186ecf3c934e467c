#include "keystep/analysis.hpp"

#include "keystep/aggregation.hpp"
#include "keystep/error.hpp"

namespace keystep {

std::vector<LatentCode> range_codes(const Dataset& dataset, const FocusRange& range,
                                    const std::optional<Region>& region, std::span<const LatentCode> external,
                                    const DescriptorConfig& cfg) {
    const bool whole = !region || region->is_full(dataset.width(), dataset.height());
    if (whole && !external.empty()) {
        if (external.size() != dataset.size()) {
            throw FormatError("latent-code file holds " + std::to_string(external.size()) + " codes for " +
                              std::to_string(dataset.size()) + " frames");
        }
        if (range.end >= external.size() || range.start > range.end) throw BoundsError("range outside codes", {"range"});
        return {external.begin() + static_cast<std::ptrdiff_t>(range.start),
                external.begin() + static_cast<std::ptrdiff_t>(range.end + 1)};
    }
    return compute_codes(dataset, range, region, cfg);
}

SelectionResult select(const Dataset& dataset, const SelectionParams& params, std::span<const LatentCode> external) {
    validate_params(params, dataset.size());
    if (params.region) validate_region(*params.region, dataset.width(), dataset.height());
    CostMatrix structural;
    if (params.alpha > 0.0) {
        const auto codes = range_codes(dataset, params.range, params.region, external);
        structural = structural_cost_matrix(codes);
    }
    std::vector<double> stat;
    if (params.beta > 0.0) {
        stat = normalize_series(aggregate(dataset, params.range, params.region, params.aggregation));
    }
    return run_selection(params, structural, stat);
}

std::vector<std::size_t> preload_order(std::span<const std::size_t> salient, const FocusRange& range) {
    std::vector<std::size_t> order;
    std::vector<bool> seen(range.length(), false);
    auto push = [&](std::size_t t) {
        if (!range.contains(t) || seen[t - range.start]) return;
        seen[t - range.start] = true;
        order.push_back(t);
    };
    for (auto s : salient) push(s);
    for (std::size_t d = 1; order.size() < range.length() && d <= range.length(); ++d) {
        for (auto s : salient) {
            if (s >= d) push(s - d);
            push(s + d);
        }
    }
    for (std::size_t t = range.start; t <= range.end; ++t) push(t);
    return order;
}

}  // namespace keystep
