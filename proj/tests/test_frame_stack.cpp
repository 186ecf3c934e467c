#include <fstream>

#include "doctest.h"
#include "json.hpp"
#include "keystep/error.hpp"
#include "keystep/frame_stack.hpp"
#include "keystep/synth.hpp"
#include "support.hpp"

using namespace keystep;
using testing::kNaN;
namespace fs = std::filesystem;

namespace {

void write_meta(const fs::path& dir, std::size_t w, std::size_t h, std::size_t count) {
    nlohmann::json meta{{"id", "m"}, {"variable", "tmp2m"}, {"width", w}, {"height", h}, {"count", count},
                        {"timestamps", testing::hourly(count)}, {"extent", {0, 0, 1, 1}}};
    std::ofstream(dir / "meta.json") << meta.dump();
}

void write_csv(const fs::path& file, const std::string& body) { std::ofstream(file) << body; }

}  // namespace

TEST_CASE("ingest CSV frames") {
    testing::TempDir dir("csv");
    write_meta(dir.path, 2, 2, 3);
    write_csv(dir.path / "frame_000000.csv", "0,1\n2,3\n");
    write_csv(dir.path / "frame_000001.csv", "4,5\n6,7\n");
    write_csv(dir.path / "frame_000002.csv", "8,9\nnan,11\n");
    auto d = ingest_stack(dir.path);
    CHECK(d.size() == 3);
    CHECK(d.norm.vmin == 0);
    CHECK(d.norm.vmax == 11);
    CHECK(std::isnan(d.frames[2].at(0, 1)));
    CHECK(d.variable == "tmp2m");
}

TEST_CASE("ingest rejects broken stacks") {
    testing::TempDir dir("broken");
    write_meta(dir.path, 2, 2, 3);
    write_csv(dir.path / "frame_000000.csv", "0,1\n2,3\n");
    write_csv(dir.path / "frame_000002.csv", "0,1\n2,3\n");
    CHECK_THROWS_AS(ingest_stack(dir.path), FormatError);

    write_csv(dir.path / "frame_000001.csv", "0,1,2\n2,3,4\n");
    CHECK_THROWS_AS(ingest_stack(dir.path), FormatError);

    write_csv(dir.path / "frame_000001.csv", "nan,nan\nnan,nan\n");
    write_csv(dir.path / "frame_000000.csv", "nan,nan\nnan,nan\n");
    write_csv(dir.path / "frame_000002.csv", "nan,nan\nnan,nan\n");
    CHECK_THROWS_AS(ingest_stack(dir.path), EmptyDataError);

    CHECK_THROWS_AS(ingest_stack(dir.path / "nowhere"), IoError);
    std::ofstream(dir.path / "meta.json") << "{not json";
    CHECK_THROWS_AS(ingest_stack(dir.path), FormatError);
}

TEST_CASE("single-frame stack") {
    testing::TempDir dir("single");
    write_meta(dir.path, 2, 1, 1);
    write_csv(dir.path / "frame_000000.csv", "1,2\n");
    CHECK(ingest_stack(dir.path).size() == 1);
}

TEST_CASE("f32 file length must match the grid") {
    testing::TempDir dir("f32");
    write_f32_frame(GridFrame(3, 3, 1.0), dir.path / "a.f32");
    CHECK(fs::file_size(dir.path / "a.f32") == 36);
    CHECK(read_f32_frame(dir.path / "a.f32", 3, 3).values == std::vector<double>(9, 1.0));
    CHECK_THROWS_AS(read_f32_frame(dir.path / "a.f32", 4, 3), FormatError);
}

TEST_CASE("property: export then ingest is bit-exact") {
    testing::Gen g(51);
    for (int it = 0; it < 25; ++it) {
        const auto t = g.index(1, 6), w = g.index(1, 9), h = g.index(1, 9);
        std::vector<GridFrame> frames;
        for (std::size_t i = 0; i < t; ++i) {
            auto f = g.frame(w, h, 0.15, -300, 300);
            for (auto& v : f.values) v = static_cast<float>(v);
            frames.push_back(f);
        }
        frames[0].values[0] = 1.5f;
        auto d = make_dataset("rt" + std::to_string(it), "v", frames, testing::hourly(t), {1, 2, 3, 4});
        testing::TempDir dir("rt");
        export_stack(d, dir.path);
        auto back = ingest_stack(dir.path);
        CHECK(back == d);
        for (std::size_t i = 0; i < t; ++i) {
            for (std::size_t c = 0; c < w * h; ++c) CHECK(testing::same_bits(back.frames[i].values[c], d.frames[i].values[c]));
        }
    }
}

TEST_CASE("synthetic datasets survive a round-trip") {
    for (auto fam : {SynthFamily::Ramp, SynthFamily::Burst, SynthFamily::Blob, SynthFamily::Seasonal}) {
        auto d = synthesize({fam, 8, 10, 6, 5});
        testing::TempDir dir("synth");
        export_stack(d, dir.path);
        auto once = ingest_stack(dir.path);
        testing::TempDir dir2("synth2");
        export_stack(once, dir2.path);
        CHECK(ingest_stack(dir2.path) == once);
        CHECK(once.timestamps == d.timestamps);
        CHECK(once.extent == d.extent);
    }
}
