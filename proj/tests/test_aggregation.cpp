#include "doctest.h"
#include "keystep/aggregation.hpp"
#include "keystep/error.hpp"
#include "support.hpp"

using namespace keystep;
using testing::kNaN;

TEST_CASE("aggregate_frame") {
    GridFrame f(2, 2, std::vector<double>{1, 2, kNaN, 4});
    const auto all = Region::full(2, 2);
    CHECK(aggregate_frame(f, all, AggregationKind::Avg) == doctest::Approx(7.0 / 3.0));
    CHECK(aggregate_frame(f, all, AggregationKind::Max) == 4);
    CHECK(aggregate_frame(f, all, AggregationKind::Min) == 1);
    CHECK(std::isnan(aggregate_frame(f, {0, 1, 0, 1}, AggregationKind::Max)));
    CHECK_THROWS_AS(aggregate_frame(f, {0, 0, 2, 0}, AggregationKind::Max), BoundsError);
}

TEST_CASE("aggregate over a dataset") {
    std::vector<GridFrame> frames{GridFrame(2, 1, std::vector<double>{1, 3}), GridFrame(2, 1, std::vector<double>{kNaN, 9}),
                                  GridFrame(2, 1, std::vector<double>{5, 7})};
    auto d = make_dataset("a", "v", frames, testing::hourly(3));
    auto left = aggregate(d, d.full_range(), Region{0, 0, 0, 0}, AggregationKind::Avg);
    CHECK(left[0] == 1);
    CHECK(std::isnan(left[1]));
    CHECK(left[2] == 5);
    auto whole = aggregate(d, {1, 2}, std::nullopt, AggregationKind::Max);
    CHECK(whole == std::vector<double>{9, 7});
}

TEST_CASE("parse_aggregation") {
    CHECK(parse_aggregation("max") == AggregationKind::Max);
    CHECK(parse_aggregation("MIN") == AggregationKind::Min);
    CHECK(parse_aggregation("Avg") == AggregationKind::Avg);
    CHECK_THROWS_AS(parse_aggregation("median"), ConstraintError);
}

TEST_CASE("normalize_series") {
    CHECK(normalize_series(std::vector<double>{2, 4, 6}) == std::vector<double>{0, 0.5, 1});
    CHECK(normalize_series(std::vector<double>{5, 5, 5}) == std::vector<double>{0, 0, 0});
    auto gap = normalize_series(std::vector<double>{1, kNaN, 3});
    CHECK(gap[0] == 0);
    CHECK(std::isnan(gap[1]));
    CHECK(gap[2] == 1);
    CHECK_THROWS_AS(normalize_series(std::vector<double>{kNaN, kNaN}), EmptyDataError);
}

TEST_CASE("property: statistical cost is symmetric and bounded on unit inputs") {
    testing::Gen g(21);
    for (int it = 0; it < 1000; ++it) {
        const double a = g.uniform(), b = g.uniform();
        CHECK(statistical_cost(a, b) == statistical_cost(b, a));
        CHECK(statistical_cost(a, b) >= 1.0 - std::tanh(1.0));
        CHECK(statistical_cost(a, b) <= 1.0);
    }
}

TEST_CASE("property: normalize_series ignores positive affine maps") {
    testing::Gen g(22);
    for (int it = 0; it < 300; ++it) {
        auto v = g.vec(g.index(1, 30), -100, 100);
        for (auto& x : v) {
            if (g.coin(0.1)) x = kNaN;
        }
        v.push_back(g.uniform());
        const double a = std::exp(g.uniform(-4, 4)), b = g.uniform(-50, 50);
        auto w = v;
        for (auto& x : w) x = a * x + b;
        auto nv = normalize_series(v), nw = normalize_series(w);
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (std::isnan(nv[i])) {
                CHECK(std::isnan(nw[i]));
            } else {
                CHECK(std::abs(nv[i] - nw[i]) <= 1e-9);
                CHECK(nv[i] >= 0.0);
                CHECK(nv[i] <= 1.0);
            }
        }
    }
}

TEST_CASE("property: AVG of a constant frame is exact") {
    testing::Gen g(23);
    for (int it = 0; it < 300; ++it) {
        const double c = g.uniform(-1e6, 1e6);
        GridFrame f(g.index(1, 40), g.index(1, 40), c);
        CHECK(aggregate_frame(f, Region::full(f.width, f.height), AggregationKind::Avg) == c);
    }
}

TEST_CASE("property: NaN cells never change MAX or MIN of the rest") {
    testing::Gen g(24);
    for (int it = 0; it < 300; ++it) {
        auto f = g.frame(g.index(1, 10), g.index(1, 10), 0.0, -10, 10);
        const auto r = g.region(f.width, f.height);
        const double mx = aggregate_frame(f, r, AggregationKind::Max), mn = aggregate_frame(f, r, AggregationKind::Min);
        // Growing the region onto a NaN row.
        GridFrame h(f.width, f.height + 1, kNaN);
        for (std::size_t y = 0; y < f.height; ++y) {
            for (std::size_t x = 0; x < f.width; ++x) h.at(x, y) = f.at(x, y);
        }
        Region grown{r.x0, r.y0, r.x1, r.y1 + 1};
        if (r.y1 + 1 == f.height) {
            CHECK(aggregate_frame(h, grown, AggregationKind::Max) == mx);
            CHECK(aggregate_frame(h, grown, AggregationKind::Min) == mn);
        }
        // Replacing a cell with NaN leaves MAX/MIN of the other cells.
        auto k = f;
        const auto x = g.index(r.x0, r.x1), y = g.index(r.y0, r.y1);
        k.at(x, y) = kNaN;
        double want_max = -INFINITY, want_min = INFINITY;
        for (std::size_t yy = r.y0; yy <= r.y1; ++yy) {
            for (std::size_t xx = r.x0; xx <= r.x1; ++xx) {
                if (xx == x && yy == y) continue;
                want_max = std::max(want_max, f.at(xx, yy));
                want_min = std::min(want_min, f.at(xx, yy));
            }
        }
        if (r.width() * r.height() > 1) {
            CHECK(aggregate_frame(k, r, AggregationKind::Max) == want_max);
            CHECK(aggregate_frame(k, r, AggregationKind::Min) == want_min);
        }
    }
}
