#include <algorithm>

#include "doctest.h"
#include "keystep/embedding.hpp"
#include "keystep/error.hpp"
#include "support.hpp"

using namespace keystep;

namespace {

std::vector<LatentCode> random_codes(testing::Gen& g, std::size_t n, std::size_t dim) {
    std::vector<LatentCode> codes(n);
    for (auto& c : codes) c.values = g.vec(dim);
    return codes;
}

}  // namespace

TEST_CASE("collinear codes land on a segment") {
    std::vector<LatentCode> codes;
    for (int i = 0; i < 9; ++i) codes.push_back({{1.0 + i, 2.0 + 2.0 * i, -1.0 * i}});
    auto p = project_2d(codes);
    for (const auto& pt : p) CHECK(std::abs(pt.y) <= 1e-9);
    CHECK(p.front().x == doctest::Approx(-p.back().x));
}

TEST_CASE("duplicates coincide and zero variance sits at the origin") {
    testing::Gen g(61);
    auto codes = random_codes(g, 4, 6);
    codes.push_back(codes[1]);
    auto p = project_2d(codes);
    CHECK(p[4].x == p[1].x);
    CHECK(p[4].y == p[1].y);

    std::vector<LatentCode> same(5, LatentCode{{1, 2, 3}});
    for (const auto& pt : project_2d(same)) {
        CHECK(pt.x == 0.0);
        CHECK(pt.y == 0.0);
    }
    CHECK_THROWS_AS(project_2d(std::vector<LatentCode>(2, LatentCode{{1.0}})), BoundsError);
}

TEST_CASE("right triangle keeps its shape") {
    std::vector<LatentCode> codes{{{0, 0, 0, 5}}, {{3, 0, 0, 5}}, {{0, 4, 0, 5}}};
    auto p = project_2d(codes, 10);
    CHECK(p[0].frame == 10);
    auto dist = [&](int i, int j) { return std::hypot(p[i].x - p[j].x, p[i].y - p[j].y); };
    const double scale = dist(0, 1) / 3.0;
    CHECK(dist(0, 2) == doctest::Approx(4.0 * scale).epsilon(1e-6));
    CHECK(dist(1, 2) == doctest::Approx(5.0 * scale).epsilon(1e-6));
    for (const auto& pt : p) {
        CHECK(std::abs(pt.x) <= 1.0 + 1e-12);
        CHECK(std::abs(pt.y) <= 1.0 + 1e-12);
    }
}

TEST_CASE("display sampling") {
    std::vector<EmbeddedPoint> few(400);
    sample_for_display(few, {});
    CHECK(std::none_of(few.begin(), few.end(), [](auto& p) { return p.sampled_out; }));

    std::vector<EmbeddedPoint> many(1000);
    for (std::size_t i = 0; i < many.size(); ++i) many[i].frame = i;
    sample_for_display(many, {});
    for (std::size_t i = 0; i < many.size(); ++i) CHECK(many[i].sampled_out == (i % 2 == 1));

    sample_for_display(many, {999});
    CHECK_FALSE(many[999].sampled_out);
    CHECK(many[999].salient);
    CHECK(std::count_if(many.begin(), many.end(), [](auto& p) { return !p.sampled_out; }) <= 501);
}

TEST_CASE("property: projection is deterministic and order-restoring") {
    testing::Gen g(62);
    for (int it = 0; it < 30; ++it) {
        auto codes = random_codes(g, g.index(3, 40), g.index(2, 20));
        auto a = project_2d(codes), b = project_2d(codes);
        std::vector<std::size_t> perm(codes.size());
        for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
        std::shuffle(perm.begin(), perm.end(), g.rng);
        std::vector<LatentCode> shuffled;
        for (auto i : perm) shuffled.push_back(codes[i]);
        auto c = project_2d(shuffled);
        for (std::size_t i = 0; i < codes.size(); ++i) {
            CHECK(a[i].x == b[i].x);
            CHECK(a[i].y == b[i].y);
            // Same point set, up to rounding in the covariance sums.
            CHECK(c[i].x == doctest::Approx(a[perm[i]].x).epsilon(1e-6).scale(1.0));
            CHECK(c[i].y == doctest::Approx(a[perm[i]].y).epsilon(1e-6).scale(1.0));
        }
    }
}

TEST_CASE("property: salient points are never sampled out") {
    testing::Gen g(63);
    for (int it = 0; it < 100; ++it) {
        std::vector<EmbeddedPoint> pts(g.index(1, 3000));
        for (std::size_t i = 0; i < pts.size(); ++i) pts[i].frame = i;
        std::set<std::size_t> salient;
        const auto n = g.index(0, 30);
        while (salient.size() < std::min(n, pts.size())) salient.insert(g.index(0, pts.size() - 1));
        const auto cap = g.index(std::max<std::size_t>(salient.size(), 1), 800);
        sample_for_display(pts, salient, cap);
        for (auto s : salient) CHECK_FALSE(pts[s].sampled_out);
        const auto kept = std::count_if(pts.begin(), pts.end(), [](auto& p) { return !p.sampled_out; });
        if (pts.size() <= cap) {
            CHECK(static_cast<std::size_t>(kept) == pts.size());
        } else {
            CHECK(static_cast<std::size_t>(kept) <= cap + salient.size());
        }
    }
}
