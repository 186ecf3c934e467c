#pragma once

#include <cstddef>
#include <vector>

namespace keystep {

/// Dense square matrix of pair costs, row-major.
class CostMatrix {
public:
    CostMatrix() = default;
    explicit CostMatrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

    std::size_t size() const noexcept { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    const double* row(std::size_t i) const { return data_.data() + i * n_; }
    const std::vector<double>& data() const noexcept { return data_; }
    std::size_t bytes() const noexcept { return data_.size() * sizeof(double); }

    /// Square sub-block [first, first + count).
    CostMatrix block(std::size_t first, std::size_t count) const {
        CostMatrix out(count);
        for (std::size_t i = 0; i < count; ++i) {
            for (std::size_t j = 0; j < count; ++j) out(i, j) = (*this)(first + i, first + j);
        }
        return out;
    }

    friend bool operator==(const CostMatrix&, const CostMatrix&) = default;

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

}  // namespace keystep
