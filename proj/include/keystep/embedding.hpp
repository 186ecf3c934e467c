#pragma once

#include <set>
#include <span>
#include <vector>

#include "keystep/features.hpp"

namespace keystep {

struct EmbeddedPoint {
    std::size_t frame = 0;
    double x = 0.0;
    double y = 0.0;
    bool salient = false;
    bool sampled_out = false;
};

inline constexpr std::size_t kDisplayCap = 500;

/// Projection onto the two leading principal axes of the mean-centred codes.
/// Each axis is oriented so its largest-magnitude loading is positive and the
/// result is scaled uniformly into [-1, 1]^2. Zero-variance input maps every
/// point to the origin. Frame indices start at `first_frame`.
std::vector<EmbeddedPoint> project_2d(std::span<const LatentCode> codes, std::size_t first_frame = 0);

/// Marks `salient` points and, above `cap`, samples out all but an even stride
/// (salient points are always retained).
void sample_for_display(std::vector<EmbeddedPoint>& points, const std::set<std::size_t>& salient,
                        std::size_t cap = kDisplayCap);

}  // namespace keystep
