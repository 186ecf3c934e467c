#include "keystep/frame_stack.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "keystep/bytes.hpp"
#include "keystep/error.hpp"

namespace keystep {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoError("cannot open " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& file, const std::string& data) {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + file.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw IoError("short write to " + file.string());
}

template <typename T>
T required(const json& meta, const char* key) {
    if (!meta.contains(key)) throw FormatError(std::string("meta.json missing field '") + key + "'");
    try {
        return meta.at(key).get<T>();
    } catch (const json::exception& e) {
        throw FormatError(std::string("meta.json field '") + key + "': " + e.what());
    }
}

}  // namespace

std::string frame_file_name(std::size_t index, const char* extension) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "frame_%06zu%s", index, extension);
    return buf;
}

GridFrame read_f32_frame(const fs::path& file, std::size_t width, std::size_t height) {
    const auto raw = read_file(file);
    if (raw.size() != width * height * 4) {
        throw FormatError(file.filename().string() + " has " + std::to_string(raw.size()) +
                          " bytes, expected " + std::to_string(width * height * 4));
    }
    std::vector<double> values(width * height);
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = bytes::get_f32(raw.data() + 4 * i);
    return GridFrame(width, height, std::move(values));
}

void write_f32_frame(const GridFrame& frame, const fs::path& file) {
    std::string raw;
    raw.reserve(frame.size() * 4);
    for (double v : frame.values) bytes::put_f32(raw, static_cast<float>(v));
    write_file(file, raw);
}

GridFrame read_csv_frame(const fs::path& file) {
    std::istringstream in(read_file(file));
    std::vector<double> values;
    std::size_t width = 0, height = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::size_t cols = 0;
        std::istringstream row(line);
        std::string cell;
        while (std::getline(row, cell, ',')) {
            const auto b = cell.find_first_not_of(" \t");
            const auto e = cell.find_last_not_of(" \t");
            cell = b == std::string::npos ? std::string() : cell.substr(b, e - b + 1);
            if (cell.empty() || cell == "nan" || cell == "NaN" || cell == "NAN") {
                values.push_back(std::nan(""));
            } else {
                std::size_t used = 0;
                double v = 0.0;
                try {
                    v = std::stod(cell, &used);
                } catch (const std::exception&) {
                    used = 0;
                }
                if (used != cell.size()) {
                    throw FormatError(file.filename().string() + ": bad number '" + cell + "'");
                }
                values.push_back(v);
            }
            ++cols;
        }
        if (height == 0) width = cols;
        if (cols != width) {
            throw FormatError(file.filename().string() + ": ragged row " + std::to_string(height));
        }
        ++height;
    }
    if (width == 0 || height == 0) throw FormatError(file.filename().string() + ": empty CSV frame");
    return GridFrame(width, height, std::move(values));
}

Dataset ingest_stack(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
    json meta;
    try {
        meta = json::parse(read_file(dir / "meta.json"));
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("meta.json: ") + e.what());
    }
    const auto id = required<std::string>(meta, "id");
    const auto variable = required<std::string>(meta, "variable");
    const auto width = required<std::size_t>(meta, "width");
    const auto height = required<std::size_t>(meta, "height");
    const auto count = required<std::size_t>(meta, "count");
    auto timestamps = required<std::vector<std::string>>(meta, "timestamps");
    const auto extent = required<std::vector<double>>(meta, "extent");
    if (extent.size() != 4) throw FormatError("meta.json 'extent' must have 4 numbers");
    if (width == 0 || height == 0) throw FormatError("meta.json declares zero-area frames");
    if (timestamps.size() != count) {
        throw FormatError("meta.json declares " + std::to_string(count) + " frames but " +
                          std::to_string(timestamps.size()) + " timestamps");
    }

    std::vector<GridFrame> frames;
    frames.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const auto f32 = dir / frame_file_name(i);
        const auto csv = dir / frame_file_name(i, ".csv");
        if (fs::exists(f32)) {
            frames.push_back(read_f32_frame(f32, width, height));
        } else if (fs::exists(csv)) {
            auto f = read_csv_frame(csv);
            if (f.width != width || f.height != height) {
                throw FormatError(csv.filename().string() + " is " + std::to_string(f.width) + "x" +
                                  std::to_string(f.height) + ", meta declares " +
                                  std::to_string(width) + "x" + std::to_string(height));
            }
            frames.push_back(std::move(f));
        } else {
            throw FormatError("frame " + std::to_string(i) + " of " + std::to_string(count) +
                              " missing in " + dir.string());
        }
    }
    return make_dataset(id, variable, std::move(frames), std::move(timestamps),
                        {extent[0], extent[1], extent[2], extent[3]});
}

void export_stack(const Dataset& dataset, const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    json meta = {
        {"id", dataset.id},
        {"variable", dataset.variable},
        {"width", dataset.width()},
        {"height", dataset.height()},
        {"count", dataset.size()},
        {"timestamps", dataset.timestamps},
        {"extent", {dataset.extent.lon0, dataset.extent.lat0, dataset.extent.lon1, dataset.extent.lat1}},
    };
    write_file(dir / "meta.json", meta.dump(2) + "\n");
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        write_f32_frame(dataset.frames[i], dir / frame_file_name(i));
    }
}

}  // namespace keystep
