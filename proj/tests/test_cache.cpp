#include <atomic>
#include <chrono>
#include <thread>

#include "doctest.h"
#include "keystep/cache.hpp"
#include "keystep/service.hpp"

using namespace keystep;

TEST_CASE("hit and miss accounting") {
    SingleFlightCache<std::string, std::string> c(1 << 20, [](const std::string& s) { return s.size(); });
    int builds = 0;
    auto make = [&] {
        ++builds;
        return std::string("value");
    };
    auto [a, hit_a] = c.get_or_build("k", make);
    auto [b, hit_b] = c.get_or_build("k", make);
    CHECK_FALSE(hit_a);
    CHECK(hit_b);
    CHECK(a == b);
    CHECK(builds == 1);
    auto s = c.stats();
    CHECK(s.hits == 1);
    CHECK(s.misses == 1);
    CHECK(s.entries == 1);
    CHECK(s.bytes == 5);
    CHECK(*c.peek("k") == "value");
    CHECK(c.peek("other") == nullptr);
}

TEST_CASE("byte budget evicts least recently used") {
    SingleFlightCache<int, std::string> c(10, [](const std::string& s) { return s.size(); });
    c.get_or_build(1, [] { return std::string(4, 'a'); });
    c.get_or_build(2, [] { return std::string(4, 'b'); });
    c.get_or_build(1, [] { return std::string(4, 'x'); });  // touch 1
    c.get_or_build(3, [] { return std::string(4, 'c'); });
    CHECK(c.peek(1) != nullptr);
    CHECK(c.peek(2) == nullptr);
    CHECK(c.peek(3) != nullptr);
    CHECK(c.stats().evictions == 1);
    CHECK(c.stats().bytes <= 10);

    // An evicted key rebuilds identically.
    auto [again, hit] = c.get_or_build(2, [] { return std::string(4, 'b'); });
    CHECK_FALSE(hit);
    CHECK(*again == "bbbb");
}

TEST_CASE("failed builds are not cached") {
    SingleFlightCache<int, int> c(100);
    CHECK_THROWS_AS(c.get_or_build(1, []() -> int { throw std::runtime_error("boom"); }), std::runtime_error);
    auto [v, hit] = c.get_or_build(1, [] { return 7; });
    CHECK_FALSE(hit);
    CHECK(*v == 7);
}

TEST_CASE("racing identical requests build once") {
    for (int round = 0; round < 5; ++round) {
        SingleFlightCache<std::string, int> c(100);
        std::atomic<int> builds{0};
        std::atomic<bool> go{false};
        std::vector<std::thread> threads;
        std::vector<int> seen(16);
        for (int i = 0; i < 16; ++i) {
            threads.emplace_back([&, i] {
                while (!go) std::this_thread::yield();
                auto [v, hit] = c.get_or_build("same", [&] {
                    ++builds;
                    std::this_thread::sleep_for(std::chrono::milliseconds(30));
                    return 42;
                });
                seen[i] = *v;
            });
        }
        go = true;
        for (auto& t : threads) t.join();
        CHECK(builds == 1);
        CHECK(c.stats().builds == 1);
        for (int v : seen) CHECK(v == 42);
    }
}

TEST_CASE("waiters see a failed build's exception") {
    SingleFlightCache<int, int> c(100);
    std::atomic<int> failures{0};
    std::vector<std::thread> threads;
    for (int i = 0; i < 4; ++i) {
        threads.emplace_back([&] {
            try {
                c.get_or_build(9, []() -> int {
                    std::this_thread::sleep_for(std::chrono::milliseconds(30));
                    throw std::runtime_error("nope");
                });
            } catch (const std::runtime_error&) {
                ++failures;
            }
        });
    }
    for (auto& t : threads) t.join();
    CHECK(failures >= 1);
    CHECK(c.peek(9) == nullptr);
}

TEST_CASE("cache keys") {
    CacheKey a{"d", std::nullopt, FocusRange{0, 9}, DerivedKind::StructuralMatrix, ""};
    CacheKey b = a;
    CHECK(a == b);
    b.region = Region{0, 0, 3, 3};
    CHECK_FALSE(a == b);
    CHECK(a.canonical() != b.canonical());
    b = a;
    b.kind = DerivedKind::Embedding;
    CHECK_FALSE(a == b);
}
