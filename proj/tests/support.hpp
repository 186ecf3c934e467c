#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <limits>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "keystep/grid.hpp"
#include "keystep/matrix.hpp"

namespace testing {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Seeded generator for property tests.
struct Gen {
    std::mt19937_64 rng;
    explicit Gen(std::uint64_t seed) : rng(seed) {}

    std::size_t index(std::size_t lo, std::size_t hi) {  // inclusive
        return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
    }
    double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
    bool coin(double p = 0.5) { return uniform() < p; }

    keystep::GridFrame frame(std::size_t w, std::size_t h, double nan_rate = 0.0, double lo = 0.0, double hi = 1.0) {
        keystep::GridFrame f(w, h);
        for (auto& v : f.values) v = coin(nan_rate) ? kNaN : uniform(lo, hi);
        return f;
    }

    keystep::Region region(std::size_t w, std::size_t h) {
        std::size_t x0 = index(0, w - 1), x1 = index(0, w - 1), y0 = index(0, h - 1), y1 = index(0, h - 1);
        if (x0 > x1) std::swap(x0, x1);
        if (y0 > y1) std::swap(y0, y1);
        return {x0, y0, x1, y1};
    }

    /// Symmetric nonnegative cost matrix.
    keystep::CostMatrix symmetric_costs(std::size_t n, bool coarse = false) {
        keystep::CostMatrix m(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i; j < n; ++j) {
                // Coarse values are dyadic so sums are exact and ties are frequent.
                const double v = coarse ? static_cast<double>(index(0, 4)) / 4.0 : uniform(0.0, 2.0);
                m(i, j) = m(j, i) = v;
            }
        }
        return m;
    }

    std::vector<double> vec(std::size_t n, double lo = -1.0, double hi = 1.0) {
        std::vector<double> v(n);
        for (auto& x : v) x = uniform(lo, hi);
        return v;
    }
};

inline std::vector<std::string> hourly(std::size_t n) {
    std::vector<std::string> ts;
    for (std::size_t i = 0; i < n; ++i) ts.push_back(keystep::format_iso8601(946684800.0 + 3600.0 * i));
    return ts;
}

/// Removed on destruction.
struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& tag) {
        static std::random_device rd;
        path = std::filesystem::temp_directory_path() / ("keystep_" + tag + "_" + std::to_string(rd()));
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
};

inline bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace testing
