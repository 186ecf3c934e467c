#pragma once

#include <functional>
#include <numbers>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "keystep/aggregation.hpp"
#include "keystep/grid.hpp"
#include "keystep/matrix.hpp"

namespace keystep {

inline constexpr double kDefaultGamma = 0.3;
inline constexpr double kDefaultSigma = 1.0;

/// User priorities and constraints. Frame indices in `pinned` / `excluded` are absolute.
struct SelectionParams {
    double alpha = 1.0;  // structural weight
    double beta = 0.0;   // statistical weight; alpha + beta == 1
    std::size_t k = 2;
    double gamma = kDefaultGamma;
    double sigma = kDefaultSigma;
    AggregationKind aggregation = AggregationKind::Avg;
    std::optional<Region> region;
    FocusRange range;
    std::set<std::size_t> pinned;
    std::set<std::size_t> excluded;

    friend bool operator==(const SelectionParams&, const SelectionParams&) = default;
};

/// Throws ConstraintError naming the offending fields. `frame_count` bounds the range.
void validate_params(const SelectionParams& params, std::size_t frame_count);

struct PairBreakdown {
    std::size_t from = 0;
    std::size_t to = 0;
    double structural = 0.0;
    double statistical = 0.0;
    double distance = 0.0;
    double combined = 0.0;
};

struct SelectionResult {
    std::vector<std::size_t> steps;  // absolute, strictly increasing, both range endpoints included
    double total_cost = 0.0;
    std::vector<PairBreakdown> pair_costs;
    SelectionParams params;
};

/// Steps relative to the range start, as produced by the optimizers.
struct Selection {
    std::vector<std::size_t> steps;
    double total_cost = 0.0;
};

using PairCostFn = std::function<double(std::size_t, std::size_t)>;

/// 1 - gamma * tanh(|i - j| / (sigma * n / k)).
double distance_cost(std::size_t i, std::size_t j, std::size_t n, std::size_t k, double gamma = kDefaultGamma,
                     double sigma = kDefaultSigma);

/// alpha * structural + beta * statistical + distance for range-relative indices.
/// `structural` may be empty when alpha == 0 and `stat` empty when beta == 0.
double combined_cost(std::size_t i, std::size_t j, const SelectionParams& params, const CostMatrix& structural,
                     std::span<const double> stat);

PairBreakdown pair_breakdown(std::size_t i, std::size_t j, const SelectionParams& params,
                             const CostMatrix& structural, std::span<const double> stat);

CostMatrix combined_cost_matrix(const SelectionParams& params, const CostMatrix& structural,
                                std::span<const double> stat);

/// Globally optimal k-subset of {0..T-1} containing both endpoints and every pinned
/// index, avoiding excluded ones, minimizing the sum of consecutive pair costs.
/// Ties resolve to the lexicographically smallest step sequence. O(T^2 k).
Selection select_salient(const CostMatrix& cost, std::size_t k, const std::set<std::size_t>& pinned = {},
                         const std::set<std::size_t>& excluded = {});
Selection select_salient(std::size_t T, std::size_t k, const PairCostFn& cost,
                         const std::set<std::size_t>& pinned = {}, const std::set<std::size_t>& excluded = {});

/// Exhaustive enumeration with the same contract and tie-break. Refuses instances with
/// more than 10^6 candidate sequences.
Selection brute_force_select(std::size_t T, std::size_t k, const PairCostFn& cost,
                             const std::set<std::size_t>& pinned = {}, const std::set<std::size_t>& excluded = {});

/// Full pipeline on precomputed range-relative inputs: validation, combined costs, DP,
/// per-pair breakdown and absolute step indices.
SelectionResult run_selection(const SelectionParams& params, const CostMatrix& structural,
                              std::span<const double> stat);

/// round(i * (T - 1) / (k - 1)) for i in [0, k), halves rounded up.
std::vector<std::size_t> even_selection(std::size_t T, std::size_t k);

struct Point2 {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Point2&, const Point2&) = default;
};

/// Translates and scales so the bounding box has unit diagonal (no-op for a degenerate box).
std::vector<Point2> normalize_trajectory(std::span<const Point2> points);

struct ArcThresholds {
    double eps = 0.3;
    double theta = std::numbers::pi / 4.0;
    double mix = 0.5;
};

/// Path simplification of a 2D trajectory: accumulates arc length and absolute
/// turning angle since the last pick and picks frame i once
/// mix * arc / eps + (1 - mix) * angle / theta >= 1. First and last frames always picked.
std::vector<std::size_t> arc_based_selection(std::span<const Point2> points, const ArcThresholds& thresholds = {});

}  // namespace keystep
