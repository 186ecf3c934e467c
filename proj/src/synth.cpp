#include "keystep/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "keystep/error.hpp"

namespace keystep {

namespace {

double gaussian_bump(double x, double y, double cx, double cy, double width) {
    const double dx = x - cx, dy = y - cy;
    return std::exp(-(dx * dx + dy * dy) / width);
}

template <typename F>
GridFrame field(std::size_t w, std::size_t h, F&& f) {
    GridFrame out(w, h);
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            const double u = w > 1 ? static_cast<double>(x) / static_cast<double>(w - 1) : 0.0;
            const double v = h > 1 ? static_cast<double>(y) / static_cast<double>(h - 1) : 0.0;
            out.at(x, y) = f(u, v);
        }
    }
    return out;
}

}  // namespace

SynthFamily parse_synth_family(const std::string& name) {
    if (name == "ramp") return SynthFamily::Ramp;
    if (name == "burst") return SynthFamily::Burst;
    if (name == "blob") return SynthFamily::Blob;
    if (name == "seasonal") return SynthFamily::Seasonal;
    throw ConstraintError("unknown synthetic family '" + name + "'", {"family"});
}

const char* to_string(SynthFamily family) {
    switch (family) {
        case SynthFamily::Ramp: return "ramp";
        case SynthFamily::Burst: return "burst";
        case SynthFamily::Blob: return "blob";
        case SynthFamily::Seasonal: return "seasonal";
    }
    return "?";
}

Dataset synthesize(const SyntheticSpec& spec) {
    if (spec.t == 0) throw ConstraintError("synthetic dataset needs t >= 1", {"t"});
    if (spec.width == 0 || spec.height == 0) throw BoundsError("synthetic frame size must be >= 1x1", {"size"});

    const auto w = spec.width, h = spec.height, t = spec.t;
    std::mt19937_64 rng(spec.seed);
    std::vector<GridFrame> frames;
    frames.reserve(t);

    switch (spec.family) {
        case SynthFamily::Ramp:
            for (std::size_t i = 0; i < t; ++i) {
                const double v = t > 1 ? static_cast<double>(i) / static_cast<double>(t - 1) : 0.0;
                frames.emplace_back(w, h, v);
            }
            break;
        case SynthFamily::Burst: {
            std::vector<std::size_t> bursts = spec.bursts;
            if (bursts.empty()) bursts.push_back(t / 2);
            for (auto b : bursts) {
                if (b >= t) throw BoundsError("burst index " + std::to_string(b) + " >= t", {"bursts"});
            }
            const auto base = field(w, h, [](double u, double v) {
                return 0.2 + 0.6 * gaussian_bump(u, v, 0.3, 0.3, 0.05);
            });
            const auto burst = field(w, h, [](double u, double v) {
                return 0.1 + 0.9 * gaussian_bump(u, v, 0.75, 0.7, 0.03);
            });
            for (std::size_t i = 0; i < t; ++i) {
                const bool is_burst = std::find(bursts.begin(), bursts.end(), i) != bursts.end();
                frames.push_back(is_burst ? burst : base);
            }
            break;
        }
        case SynthFamily::Blob: {
            std::uniform_real_distribution<double> lane(0.25, 0.75);
            const double cy = lane(rng);
            for (std::size_t i = 0; i < t; ++i) {
                const double s = t > 1 ? static_cast<double>(i) / static_cast<double>(t - 1) : 0.0;
                const double cx = 0.1 + 0.8 * s;
                frames.push_back(field(w, h, [&](double u, double v) {
                    return gaussian_bump(u, v, cx, cy + 0.1 * std::sin(2.0 * std::numbers::pi * s), 0.02);
                }));
            }
            break;
        }
        case SynthFamily::Seasonal: {
            if (!(spec.period > 0.0)) throw ConstraintError("seasonal period must be positive", {"period"});
            std::normal_distribution<double> noise(0.0, spec.noise);
            for (std::size_t i = 0; i < t; ++i) {
                const double phase = 2.0 * std::numbers::pi * static_cast<double>(i) / spec.period;
                auto f = field(w, h, [&](double u, double v) {
                    return 0.5 + 0.4 * std::sin(phase + 1.5 * u + 0.5 * v);
                });
                if (spec.noise > 0.0) {
                    for (double& x : f.values) x += noise(rng);
                }
                frames.push_back(std::move(f));
            }
            break;
        }
    }

    std::vector<std::string> timestamps;
    timestamps.reserve(t);
    const double epoch0 = parse_iso8601("2000-01-01T00:00:00Z");
    for (std::size_t i = 0; i < t; ++i) timestamps.push_back(format_iso8601(epoch0 + 3600.0 * static_cast<double>(i)));

    std::string id = spec.id.empty() ? std::string(to_string(spec.family)) + "-" + std::to_string(spec.seed) : spec.id;
    return make_dataset(std::move(id), to_string(spec.family), std::move(frames), std::move(timestamps),
                        {100.0, 20.0, 130.0, 45.0});
}

}  // namespace keystep
