#include "doctest.h"
#include "keystep/error.hpp"
#include "keystep/features.hpp"
#include "keystep/synth.hpp"
#include "support.hpp"

using namespace keystep;
using testing::kNaN;

namespace {

LatentCode code(std::vector<double> v) { return LatentCode{std::move(v)}; }

}  // namespace

TEST_CASE("pyramid descriptor of constant frame") {
    for (double c : {0.0, 0.25, 1.0}) {
        auto d = pyramid_descriptor(GridFrame(37, 19, c));
        REQUIRE(d.dims() == 512);
        for (double v : d.values) CHECK(v == doctest::Approx(c).epsilon(1e-15));
    }
}

TEST_CASE("pyramid descriptor is linear") {
    testing::Gen g(3);
    auto f = g.frame(50, 30, 0.0, 0.0, 0.5);
    auto f2 = f;
    for (auto& v : f2.values) v *= 2.0;
    auto a = pyramid_descriptor(f), b = pyramid_descriptor(f2);
    for (std::size_t i = 0; i < a.dims(); ++i) CHECK(b.values[i] == doctest::Approx(2.0 * a.values[i]).epsilon(1e-12));
}

TEST_CASE("pyramid descriptor first level of a half split") {
    GridFrame f(256, 256);
    for (std::size_t y = 0; y < 256; ++y) {
        for (std::size_t x = 128; x < 256; ++x) f.at(x, y) = 1.0;
    }
    auto d = pyramid_descriptor(f);
    // Reference: each first-level cell covers a 32x32 block of the input.
    for (std::size_t cy = 0; cy < 8; ++cy) {
        for (std::size_t cx = 0; cx < 8; ++cx) {
            double sum = 0;
            for (std::size_t y = cy * 32; y < cy * 32 + 32; ++y) {
                for (std::size_t x = cx * 32; x < cx * 32 + 32; ++x) sum += f.at(x, y);
            }
            CHECK(d.values[cy * 8 + cx] == sum / 1024.0);
            CHECK(d.values[cy * 8 + cx] == (cx < 4 ? 0.0 : 1.0));
        }
    }
    // The last level is the global mean, replicated.
    for (std::size_t i = 448; i < 512; ++i) CHECK(d.values[i] == 0.5);
}

TEST_CASE("resample_area preserves the mean") {
    testing::Gen g(4);
    for (int it = 0; it < 20; ++it) {
        auto f = g.frame(g.index(1, 40), g.index(1, 40));
        auto r = resample_area(f, 16, 16);
        double a = 0, b = 0;
        for (double v : f.values) a += v;
        for (double v : r.values) b += v;
        CHECK(b / r.size() == doctest::Approx(a / f.size()).epsilon(1e-12));
    }
}

TEST_CASE("descriptor of a zero-area frame") {
    CHECK_THROWS_AS(pyramid_descriptor(GridFrame{}), BoundsError);
}

TEST_CASE("latent-code file") {
    std::vector<LatentCode> codes{code({1, 2, 3, 4}), code({0, 0, 0, 1}), code({-1, 0.5, 0.25, 8})};
    auto raw = serialize_latent_codes(codes);
    CHECK(raw.size() == 8 + 12 * 4);
    auto back = parse_latent_codes(raw);
    REQUIRE(back.size() == 3);
    CHECK(back[0].dims() == 4);
    CHECK(back[2].values == codes[2].values);

    CHECK_THROWS_AS(parse_latent_codes(raw.substr(0, 8 + 8 * 4)), FormatError);
    CHECK_THROWS_AS(parse_latent_codes("abc"), FormatError);
    auto zero = serialize_latent_codes(std::vector<LatentCode>{code({1, 0}), code({0, 0})});
    CHECK_THROWS_AS(parse_latent_codes(zero), InvalidCodeError);
}

TEST_CASE("latent-code file on disk round-trips bit-exactly") {
    testing::TempDir dir("codes");
    testing::Gen g(5);
    std::vector<LatentCode> codes(7);
    for (auto& c : codes) {
        for (int i = 0; i < 33; ++i) c.values.push_back(static_cast<float>(g.uniform(-10, 10)));
    }
    save_latent_codes(codes, dir.path / "c.bin");
    auto back = load_latent_codes(dir.path / "c.bin");
    REQUIRE(back.size() == codes.size());
    for (std::size_t i = 0; i < codes.size(); ++i) {
        for (std::size_t d = 0; d < 33; ++d) CHECK(testing::same_bits(back[i].values[d], codes[i].values[d]));
    }
    CHECK_THROWS_AS(load_latent_codes(dir.path / "missing.bin"), IoError);
}

TEST_CASE("cosine similarity") {
    CHECK(cosine_similarity(code({3, 4}), code({3, 4})) == doctest::Approx(1.0));
    CHECK(cosine_similarity(code({1, 0}), code({0, 2})) == 0.0);
    CHECK(cosine_similarity(code({1, 0}), code({1, 1})) == doctest::Approx(0.7071067811865475244).epsilon(1e-12));
    CHECK_THROWS(cosine_similarity(code({1, 0}), code({1, 0, 0})));
    CHECK(cosine_similarity(code({0, 0}), code({1, 0})) == 0.0);
    CHECK(cosine_similarity(code({0, 0}), code({0, 0})) == 1.0);
}

TEST_CASE("structural cost matrix") {
    std::vector<LatentCode> same(5, code({0.3, 0.1, 0.9}));
    auto m = structural_cost_matrix(same);
    for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t j = 0; j < 5; ++j) CHECK(m(i, j) == doctest::Approx(0.92414181997875644881).epsilon(1e-12));
    }

    std::vector<LatentCode> blocks{code({1, 0}), code({2, 0}), code({0, 1}), code({0, 3})};
    auto b = structural_cost_matrix(blocks);
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            const double want = (i < 2) == (j < 2) ? 0.92414181997875644881 : 0.075858180021243551193;
            CHECK(b(i, j) == doctest::Approx(want).epsilon(1e-12));
        }
    }
}

TEST_CASE("property: structural cost matrix is symmetric with fixed diagonal") {
    testing::Gen g(6);
    for (int it = 0; it < 50; ++it) {
        const auto n = g.index(1, 12), dim = g.index(1, 16);
        std::vector<LatentCode> codes(n);
        for (auto& c : codes) {
            c.values = g.vec(dim);
            c.values[0] += 2.0;
        }
        auto m = structural_cost_matrix(codes);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(m(i, i) == structural_cost(1.0));
            for (std::size_t j = 0; j < n; ++j) CHECK(m(i, j) == m(j, i));
        }
    }
}

TEST_CASE("property: structural cost is increasing and bounded") {
    double prev = structural_cost(-1.0);
    CHECK(prev > 0.0);
    for (int i = 1; i <= 2000; ++i) {
        const double s = -1.0 + i / 1000.0;
        const double c = structural_cost(s);
        CHECK(c > prev);
        CHECK(c < 1.0);
        prev = c;
    }
}

TEST_CASE("property: cosine is scale invariant") {
    testing::Gen g(7);
    for (int it = 0; it < 300; ++it) {
        auto a = code(g.vec(g.index(1, 64)));
        a.values[0] = 1.0 + g.uniform();
        const double lambda = std::exp(g.uniform(-5, 5));
        auto b = a;
        for (auto& v : b.values) v *= lambda;
        CHECK(cosine_similarity(a, b) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(structural_cost(a, b) == doctest::Approx(structural_cost(a, a)).epsilon(1e-12));
    }
}

TEST_CASE("property: descriptor is deterministic and fills NaN before resampling") {
    testing::Gen g(8);
    for (int it = 0; it < 10; ++it) {
        std::vector<GridFrame> frames;
        const auto w = g.index(2, 31);
        for (int t = 0; t < 3; ++t) frames.push_back(g.frame(w, 17, 0.3));
        frames[0].values[0] = 0.0;
        frames[0].values[1] = 1.0;
        auto d = make_dataset("p", "v", frames, testing::hourly(3));
        auto codes = compute_codes(d, d.full_range(), std::nullopt);
        auto again = compute_codes(d, d.full_range(), std::nullopt);
        for (std::size_t t = 0; t < 3; ++t) {
            CHECK(codes[t].values == again[t].values);
            auto manual = pyramid_descriptor(fill_nan(normalize(frames[t], d.norm), 0.0));
            CHECK(codes[t].values == manual.values);
        }
    }
}

TEST_CASE("burst frames are structurally distinct") {
    SyntheticSpec s{SynthFamily::Burst, 40, 32, 32};
    s.bursts = {20};
    auto d = synthesize(s);
    auto codes = compute_codes(d, d.full_range(), std::nullopt);
    const double pre_pre = structural_cost(codes[5], codes[10]);
    const double pre_burst = structural_cost(codes[10], codes[20]);
    // Low cost marks a dissimilar, salient pair.
    CHECK(pre_burst < pre_pre);
    CHECK(pre_pre == doctest::Approx(structural_cost(1.0)));
}
