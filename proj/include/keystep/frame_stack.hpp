#pragma once

#include <filesystem>

#include "keystep/grid.hpp"

namespace keystep {

/// Reads a frame-stack directory: `meta.json` plus `frame_%06d.f32` files
/// (little-endian float32, row-major). A missing `.f32` file may be replaced by
/// `frame_%06d.csv` (comma-separated rows).
///
/// Throws IoError if the directory or meta file cannot be read, FormatError on
/// malformed content and EmptyDataError when every cell is NaN.
Dataset ingest_stack(const std::filesystem::path& dir);

/// Writes `meta.json` and one `.f32` file per frame. Values are narrowed to float32.
void export_stack(const Dataset& dataset, const std::filesystem::path& dir);

GridFrame read_csv_frame(const std::filesystem::path& file);
GridFrame read_f32_frame(const std::filesystem::path& file, std::size_t width, std::size_t height);
void write_f32_frame(const GridFrame& frame, const std::filesystem::path& file);

std::string frame_file_name(std::size_t index, const char* extension = ".f32");

}  // namespace keystep
