#include "keystep/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "keystep/bytes.hpp"
#include "keystep/error.hpp"

namespace keystep {

namespace {

struct Tap {
    std::size_t src;
    double weight;
};

// Area-overlap weights mapping `in` source cells onto `out` target cells.
// Coordinates are scaled by in*out so every overlap is an integer.
std::vector<std::vector<Tap>> area_taps(std::size_t in, std::size_t out) {
    std::vector<std::vector<Tap>> taps(out);
    for (std::size_t o = 0; o < out; ++o) {
        const std::size_t lo = o * in, hi = (o + 1) * in;
        for (std::size_t s = lo / out; s < in && s * out < hi; ++s) {
            const std::size_t a = std::max(lo, s * out), b = std::min(hi, (s + 1) * out);
            if (b > a) taps[o].push_back({s, static_cast<double>(b - a) / static_cast<double>(in)});
        }
    }
    return taps;
}

// Adaptive mean pooling of an s x s grid onto n x n blocks.
std::vector<double> pool(const std::vector<double>& grid, std::size_t s, std::size_t n) {
    std::vector<double> out(n * n);
    for (std::size_t cy = 0; cy < n; ++cy) {
        const std::size_t y0 = cy * s / n, y1 = ((cy + 1) * s + n - 1) / n;
        for (std::size_t cx = 0; cx < n; ++cx) {
            const std::size_t x0 = cx * s / n, x1 = ((cx + 1) * s + n - 1) / n;
            double sum = 0.0;
            for (std::size_t y = y0; y < y1; ++y) {
                for (std::size_t x = x0; x < x1; ++x) sum += grid[y * s + x];
            }
            out[cy * n + cx] = sum / static_cast<double>((y1 - y0) * (x1 - x0));
        }
    }
    return out;
}

}  // namespace

double LatentCode::norm() const {
    return std::sqrt(std::inner_product(values.begin(), values.end(), values.begin(), 0.0));
}

GridFrame resample_area(const GridFrame& frame, std::size_t out_w, std::size_t out_h) {
    if (frame.width == 0 || frame.height == 0 || out_w == 0 || out_h == 0) {
        throw BoundsError("cannot resample a zero-area frame");
    }
    const auto tx = area_taps(frame.width, out_w);
    const auto ty = area_taps(frame.height, out_h);

    std::vector<double> rows(frame.height * out_w);
    for (std::size_t y = 0; y < frame.height; ++y) {
        const double* src = frame.values.data() + y * frame.width;
        for (std::size_t x = 0; x < out_w; ++x) {
            double acc = 0.0;
            for (const auto& t : tx[x]) acc += t.weight * src[t.src];
            rows[y * out_w + x] = acc;
        }
    }
    GridFrame out(out_w, out_h);
    for (std::size_t y = 0; y < out_h; ++y) {
        for (std::size_t x = 0; x < out_w; ++x) {
            double acc = 0.0;
            for (const auto& t : ty[y]) acc += t.weight * rows[t.src * out_w + x];
            out.at(x, y) = acc;
        }
    }
    return out;
}

LatentCode pyramid_descriptor(const GridFrame& frame, const DescriptorConfig& cfg) {
    if (frame.width == 0 || frame.height == 0 || frame.values.empty()) {
        throw BoundsError("descriptor of a zero-area frame");
    }
    if (cfg.levels == 0 || cfg.cells == 0 || cfg.base_size == 0) {
        throw BoundsError("descriptor config needs levels, cells and base_size >= 1");
    }
    auto level = resample_area(frame, cfg.base_size, cfg.base_size).values;
    std::size_t side = cfg.base_size;

    LatentCode code;
    code.values.reserve(cfg.code_dims());
    for (std::size_t l = 0; l < cfg.levels; ++l) {
        const std::size_t next = std::max<std::size_t>(1, side / 2);
        level = pool(level, side, next);
        side = next;
        if (side >= cfg.cells) {
            const auto grid = pool(level, side, cfg.cells);
            code.values.insert(code.values.end(), grid.begin(), grid.end());
        } else {
            for (std::size_t cy = 0; cy < cfg.cells; ++cy) {
                for (std::size_t cx = 0; cx < cfg.cells; ++cx) {
                    code.values.push_back(level[(cy * side / cfg.cells) * side + cx * side / cfg.cells]);
                }
            }
        }
    }
    return code;
}

std::vector<LatentCode> compute_codes(const Dataset& dataset, const FocusRange& range,
                                      const std::optional<Region>& region, const DescriptorConfig& cfg) {
    if (range.end >= dataset.size() || range.start > range.end) {
        throw BoundsError("code range outside dataset", {"range"});
    }
    if (region) validate_region(*region, dataset.width(), dataset.height());
    std::vector<LatentCode> codes;
    codes.reserve(range.length());
    for (std::size_t t = range.start; t <= range.end; ++t) {
        codes.push_back(pyramid_descriptor(prepare(dataset.frames[t], dataset.norm, region), cfg));
    }
    return codes;
}

std::vector<LatentCode> parse_latent_codes(const std::string& raw) {
    if (raw.size() < 8) throw FormatError("latent-code file shorter than its header");
    const std::size_t count = bytes::get_u32(raw.data());
    const std::size_t dim = bytes::get_u32(raw.data() + 4);
    if (dim == 0) throw FormatError("latent-code file declares dim 0");
    if (raw.size() != 8 + count * dim * 4) {
        throw FormatError("latent-code file header declares " + std::to_string(count) + "x" +
                          std::to_string(dim) + " floats but holds " +
                          std::to_string((raw.size() - 8) / 4) + " (" + std::to_string(raw.size() - 8) +
                          " payload bytes)");
    }
    std::vector<LatentCode> codes(count);
    const char* p = raw.data() + 8;
    for (std::size_t i = 0; i < count; ++i) {
        codes[i].values.resize(dim);
        for (std::size_t d = 0; d < dim; ++d, p += 4) codes[i].values[d] = bytes::get_f32(p);
        const double n = codes[i].norm();
        if (!(n > 0.0) || !std::isfinite(n)) {
            throw InvalidCodeError("latent code " + std::to_string(i) + " has zero or non-finite norm");
        }
    }
    return codes;
}

std::vector<LatentCode> load_latent_codes(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoError("cannot open " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_latent_codes(ss.str());
}

std::string serialize_latent_codes(std::span<const LatentCode> codes) {
    const std::size_t dim = codes.empty() ? 0 : codes.front().dims();
    for (const auto& c : codes) {
        if (c.dims() != dim) throw FormatError("latent codes have differing dims");
    }
    std::string out;
    out.reserve(8 + codes.size() * dim * 4);
    bytes::put_u32(out, static_cast<std::uint32_t>(codes.size()));
    bytes::put_u32(out, static_cast<std::uint32_t>(dim));
    for (const auto& c : codes) {
        for (double v : c.values) bytes::put_f32(out, static_cast<float>(v));
    }
    return out;
}

void save_latent_codes(std::span<const LatentCode> codes, const std::filesystem::path& file) {
    const auto raw = serialize_latent_codes(codes);
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + file.string());
    out.write(raw.data(), static_cast<std::streamsize>(raw.size()));
    if (!out) throw IoError("short write to " + file.string());
}

namespace {

double cosine_from(double dot, double na, double nb) {
    if (na == 0.0 || nb == 0.0) return na == nb ? 1.0 : 0.0;
    return std::clamp(dot / (na * nb), -1.0, 1.0);
}

}  // namespace

double cosine_similarity(const LatentCode& a, const LatentCode& b) {
    if (a.dims() != b.dims()) {
        throw InvalidCodeError("code dims differ: " + std::to_string(a.dims()) + " vs " + std::to_string(b.dims()));
    }
    const double na = a.norm(), nb = b.norm();
    if (!std::isfinite(na) || !std::isfinite(nb)) throw InvalidCodeError("cosine similarity of a non-finite code");
    return cosine_from(std::inner_product(a.values.begin(), a.values.end(), b.values.begin(), 0.0), na, nb);
}

double structural_cost(double similarity) { return 1.0 / (1.0 + std::exp(-5.0 * (similarity - 0.5))); }

double structural_cost(const LatentCode& a, const LatentCode& b) {
    return structural_cost(cosine_similarity(a, b));
}

CostMatrix structural_cost_matrix(std::span<const LatentCode> codes) {
    const std::size_t n = codes.size();
    std::vector<double> norms(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (codes[i].dims() != codes.front().dims()) throw InvalidCodeError("code dims differ within one context");
        norms[i] = codes[i].norm();
        if (!std::isfinite(norms[i])) throw InvalidCodeError("latent code " + std::to_string(i) + " is not finite");
    }
    CostMatrix m(n);
    const double self = structural_cost(1.0);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = self;
        const auto& a = codes[i].values;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dot = std::inner_product(a.begin(), a.end(), codes[j].values.begin(), 0.0);
            const double c = structural_cost(cosine_from(dot, norms[i], norms[j]));
            m(i, j) = c;
            m(j, i) = c;
        }
    }
    return m;
}

}  // namespace keystep
