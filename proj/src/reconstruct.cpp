#include "keystep/reconstruct.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "keystep/error.hpp"

namespace keystep {

namespace {

void check_pair(std::span<const GridFrame> a, std::span<const GridFrame> b) {
    if (a.size() != b.size()) throw FormatError("metric inputs have different frame counts");
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].width != b[i].width || a[i].height != b[i].height) {
            throw FormatError("metric inputs differ in frame dimensions at " + std::to_string(i));
        }
    }
}

std::vector<double> gaussian_kernel(std::size_t size, double sigma) {
    std::vector<double> k(size);
    const double c = (static_cast<double>(size) - 1.0) / 2.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < size; ++i) {
        const double d = static_cast<double>(i) - c;
        k[i] = std::exp(-d * d / (2.0 * sigma * sigma));
        sum += k[i];
    }
    for (double& v : k) v /= sum;
    return k;
}

// Separable "valid" correlation of a w x h image with a 1D kernel in both axes.
std::vector<double> filter_valid(const std::vector<double>& img, std::size_t w, std::size_t h,
                                 const std::vector<double>& k) {
    const std::size_t n = k.size(), ow = w - n + 1, oh = h - n + 1;
    std::vector<double> tmp(h * ow);
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) acc += k[i] * img[y * w + x + i];
            tmp[y * ow + x] = acc;
        }
    }
    std::vector<double> out(oh * ow);
    for (std::size_t y = 0; y < oh; ++y) {
        for (std::size_t x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) acc += k[i] * tmp[(y + i) * ow + x];
            out[y * ow + x] = acc;
        }
    }
    return out;
}

double ssim_term(double mu_a, double mu_b, double var_a, double var_b, double cov, double c1, double c2) {
    return ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) / ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
}

}  // namespace

std::vector<GridFrame> interpolate(std::span<const GridFrame> frames, std::span<const std::size_t> steps) {
    if (frames.empty()) throw BoundsError("interpolation over an empty frame list");
    if (steps.empty() || steps.front() != 0 || steps.back() != frames.size() - 1) {
        throw ConstraintError("steps must start at the first frame and end at the last", {"steps"});
    }
    for (std::size_t i = 1; i < steps.size(); ++i) {
        if (steps[i] <= steps[i - 1]) throw ConstraintError("steps must be strictly increasing", {"steps"});
    }
    std::vector<GridFrame> out(frames.size());
    out[steps.front()] = frames[steps.front()];
    for (std::size_t s = 1; s < steps.size(); ++s) {
        const std::size_t a = steps[s - 1], b = steps[s];
        const auto& fa = frames[a];
        const auto& fb = frames[b];
        if (fa.width != fb.width || fa.height != fb.height) throw FormatError("frames differ in dimensions");
        for (std::size_t t = a + 1; t < b; ++t) {
            const double w = static_cast<double>(t - a) / static_cast<double>(b - a);
            GridFrame f(fa.width, fa.height);
            for (std::size_t i = 0; i < f.values.size(); ++i) {
                f.values[i] = fa.values[i] + w * (fb.values[i] - fa.values[i]);
            }
            out[t] = std::move(f);
        }
        out[b] = fb;
    }
    return out;
}

std::vector<GridFrame> interpolate(const Dataset& dataset, const FocusRange& range, std::span<const std::size_t> steps) {
    validate_range(range, dataset.size());
    std::vector<std::size_t> rel;
    rel.reserve(steps.size());
    for (auto s : steps) {
        if (!range.contains(s)) throw ConstraintError("step " + std::to_string(s) + " outside range", {"steps"});
        rel.push_back(s - range.start);
    }
    std::span<const GridFrame> slice(dataset.frames.data() + range.start, range.length());
    return interpolate(slice, rel);
}

double mse(std::span<const GridFrame> a, std::span<const GridFrame> b) {
    check_pair(a, b);
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t f = 0; f < a.size(); ++f) {
        for (std::size_t i = 0; i < a[f].values.size(); ++i) {
            const double x = a[f].values[i], y = b[f].values[i];
            if (std::isnan(x) || std::isnan(y)) continue;
            sum += (x - y) * (x - y);
            ++n;
        }
    }
    if (n == 0) throw EmptyDataError("no cell is finite in both inputs");
    return sum / static_cast<double>(n);
}

double rmse(std::span<const GridFrame> a, std::span<const GridFrame> b) { return std::sqrt(mse(a, b)); }

double rmse(const GridFrame& a, const GridFrame& b) {
    return rmse(std::span<const GridFrame>(&a, 1), std::span<const GridFrame>(&b, 1));
}

double psnr_from_mse(double m) {
    if (m <= 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / m);
}

double psnr(std::span<const GridFrame> a, std::span<const GridFrame> b) { return psnr_from_mse(mse(a, b)); }

std::string format_psnr(double db) {
    if (std::isinf(db) && db > 0) return "inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", db);
    return buf;
}

double ssim(const GridFrame& a, const GridFrame& b, const SsimOptions& o) {
    if (a.width != b.width || a.height != b.height) throw FormatError("ssim inputs differ in dimensions");
    const double c1 = (o.k1 * o.dynamic_range) * (o.k1 * o.dynamic_range);
    const double c2 = (o.k2 * o.dynamic_range) * (o.k2 * o.dynamic_range);
    const std::size_t w = a.width, h = a.height;

    if (w < o.window || h < o.window) {
        const double n = static_cast<double>(a.values.size());
        double ma = 0.0, mb = 0.0;
        for (std::size_t i = 0; i < a.values.size(); ++i) {
            ma += a.values[i];
            mb += b.values[i];
        }
        ma /= n;
        mb /= n;
        double va = 0.0, vb = 0.0, cov = 0.0;
        for (std::size_t i = 0; i < a.values.size(); ++i) {
            const double da = a.values[i] - ma, db = b.values[i] - mb;
            va += da * da;
            vb += db * db;
            cov += da * db;
        }
        return ssim_term(ma, mb, va / n, vb / n, cov / n, c1, c2);
    }

    const auto k = gaussian_kernel(o.window, o.sigma);
    std::vector<double> aa(a.values.size()), bb(a.values.size()), ab(a.values.size());
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        aa[i] = a.values[i] * a.values[i];
        bb[i] = b.values[i] * b.values[i];
        ab[i] = a.values[i] * b.values[i];
    }
    const auto mu_a = filter_valid(a.values, w, h, k);
    const auto mu_b = filter_valid(b.values, w, h, k);
    const auto s_aa = filter_valid(aa, w, h, k);
    const auto s_bb = filter_valid(bb, w, h, k);
    const auto s_ab = filter_valid(ab, w, h, k);
    double total = 0.0;
    for (std::size_t i = 0; i < mu_a.size(); ++i) {
        const double ma = mu_a[i], mb = mu_b[i];
        total += ssim_term(ma, mb, s_aa[i] - ma * ma, s_bb[i] - mb * mb, s_ab[i] - ma * mb, c1, c2);
    }
    return total / static_cast<double>(mu_a.size());
}

double ssim(std::span<const GridFrame> a, std::span<const GridFrame> b, const SsimOptions& o) {
    check_pair(a, b);
    if (a.empty()) throw EmptyDataError("ssim of an empty frame list");
    double total = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) total += ssim(a[i], b[i], o);
    return total / static_cast<double>(a.size());
}

}  // namespace keystep
