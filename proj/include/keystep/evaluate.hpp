#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "keystep/features.hpp"
#include "keystep/selector.hpp"

namespace keystep {

enum class EvalMethod { Dp, Even, Arc };

EvalMethod parse_eval_method(const std::string& name);
const char* to_string(EvalMethod method);

struct EvalOptions {
    std::vector<EvalMethod> methods{EvalMethod::Dp, EvalMethod::Even, EvalMethod::Arc};
    std::vector<std::size_t> ks{5, 10, 20};
    bool beta_sweep = false;
    std::optional<Region> region;
    AggregationKind aggregation = AggregationKind::Avg;
    double gamma = kDefaultGamma;
    double sigma = kDefaultSigma;
    ArcThresholds arc;
};

struct EvalRow {
    EvalMethod method = EvalMethod::Dp;
    std::size_t k = 0;
    std::vector<std::size_t> steps;  // absolute
    double rmse = 0.0;
    double psnr_db = 0.0;
    double ssim = 0.0;
    double select_ms = 0.0;
    double interp_ms = 0.0;
};

struct EvalFailure {
    EvalMethod method = EvalMethod::Dp;
    std::size_t k = 0;
    std::string message;
};

struct BetaSweepEntry {
    double beta = 0.0;
    std::size_t k = 0;
    std::vector<std::size_t> steps;
};

struct StageTimings {
    double preprocess_ms = 0.0;
    double codes_ms = 0.0;
};

struct EvalReport {
    std::string dataset_id;
    FocusRange range;
    std::vector<EvalMethod> methods;
    std::vector<EvalRow> rows;          // method-major, then k in request order
    std::vector<EvalFailure> failures;  // infeasible (method, k) cells
    std::vector<BetaSweepEntry> beta_sweep;
    StageTimings timings;
    std::optional<std::size_t> arc_default_k;  // frames picked at the unscaled thresholds
};

inline constexpr double kBetaSweep[] = {0.0, 0.25, 0.5, 0.75, 1.0};

/// Selects with every (method, k), reconstructs the range piecewise-linearly and
/// scores it against the normalized, NaN-filled originals. DP runs with alpha = 1,
/// beta = 0. Arc rows scale the arc thresholds until exactly k frames result.
EvalReport evaluate(const Dataset& dataset, const FocusRange& range, const EvalOptions& options,
                    std::span<const LatentCode> external = {});

/// Arc-based selection of exactly k frames by scaling eps and theta together.
/// Returns nullopt if no scale produces k frames.
std::optional<std::vector<std::size_t>> arc_selection_with_k(std::span<const Point2> points, std::size_t k,
                                                              const ArcThresholds& base);

/// Columns: method,k,rmse,psnr_db,ssim,select_ms,interp_ms
std::string to_csv(const EvalReport& report);

}  // namespace keystep
