#pragma once

#include <span>
#include <string>
#include <vector>

#include "keystep/grid.hpp"

namespace keystep {

/// Piecewise-linear reconstruction of `frames` from the frames at `steps`
/// (indices into `frames`, strictly increasing, first 0 and last frames.size()-1).
/// Selected frames are copied verbatim; NaN in either bracketing frame gives NaN.
std::vector<GridFrame> interpolate(std::span<const GridFrame> frames, std::span<const std::size_t> steps);

/// Same, over a focus range of `dataset` with absolute `steps`.
std::vector<GridFrame> interpolate(const Dataset& dataset, const FocusRange& range,
                                   std::span<const std::size_t> steps);

/// Mean squared difference over cells finite in both inputs. Throws EmptyDataError if none.
double mse(std::span<const GridFrame> a, std::span<const GridFrame> b);
double rmse(std::span<const GridFrame> a, std::span<const GridFrame> b);
double rmse(const GridFrame& a, const GridFrame& b);

/// 10 log10(1 / mse) for data in [0, 1]; +inf for identical inputs.
double psnr_from_mse(double mse);
double psnr(std::span<const GridFrame> a, std::span<const GridFrame> b);
/// "inf" for infinite PSNR, otherwise the value with 6 decimals.
std::string format_psnr(double db);

struct SsimOptions {
    std::size_t window = 11;
    double sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 1.0;
};

/// Mean local SSIM (Gaussian window). Frames smaller than the window use one
/// global, uniformly weighted window.
double ssim(const GridFrame& a, const GridFrame& b, const SsimOptions& opts = {});
/// Mean of per-frame SSIM.
double ssim(std::span<const GridFrame> a, std::span<const GridFrame> b, const SsimOptions& opts = {});

}  // namespace keystep
