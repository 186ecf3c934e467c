#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "keystep/grid.hpp"
#include "keystep/matrix.hpp"

namespace keystep {

/// Per-frame structural feature vector.
struct LatentCode {
    std::vector<double> values;

    std::size_t dims() const noexcept { return values.size(); }
    double norm() const;
    friend bool operator==(const LatentCode&, const LatentCode&) = default;
};

/// Multi-scale pyramid descriptor. The code length is `levels * cells * cells`
/// (512 with the defaults).
struct DescriptorConfig {
    std::size_t base_size = 256;
    std::size_t levels = 8;
    std::size_t cells = 8;

    std::size_t code_dims() const noexcept { return levels * cells * cells; }
};

/// Area-mean resample of `frame` onto a `out_w` x `out_h` grid.
GridFrame resample_area(const GridFrame& frame, std::size_t out_w, std::size_t out_h);

/// Mean-pooled descriptor of a normalized, NaN-free frame:
///  1. area-mean resample to base_size x base_size
///  2. successive 2x mean pooling gives levels L1..Ln
///  3. each level is mean-pooled onto a cells x cells grid; levels narrower than
///     the grid replicate their values
///  4. the level grids are concatenated in order L1..Ln
LatentCode pyramid_descriptor(const GridFrame& frame, const DescriptorConfig& cfg = {});

/// Codes for frames [range.start, range.end] of `dataset`, each cropped to `region`,
/// normalized with the dataset NormStats and NaN-filled with 0.
std::vector<LatentCode> compute_codes(const Dataset& dataset, const FocusRange& range,
                                      const std::optional<Region>& region,
                                      const DescriptorConfig& cfg = {});

/// Latent-code file: u32 count, u32 dim (little-endian), then count*dim float32, row-major.
std::vector<LatentCode> load_latent_codes(const std::filesystem::path& file);
std::vector<LatentCode> parse_latent_codes(const std::string& raw);
void save_latent_codes(std::span<const LatentCode> codes, const std::filesystem::path& file);
std::string serialize_latent_codes(std::span<const LatentCode> codes);

/// Cosine of the angle between two codes, clamped to [-1, 1]. A zero code (an
/// all-minimum or fully masked frame) is similar only to another zero code:
/// 1 when both are zero, 0 when exactly one is.
double cosine_similarity(const LatentCode& a, const LatentCode& b);

/// Sigmoid map of a cosine similarity: 1 / (1 + exp(-5 (s - 0.5))).
double structural_cost(double similarity);
double structural_cost(const LatentCode& a, const LatentCode& b);

/// Symmetric matrix of structural_cost over all pairs; the diagonal is structural_cost(1).
CostMatrix structural_cost_matrix(std::span<const LatentCode> codes);

}  // namespace keystep
