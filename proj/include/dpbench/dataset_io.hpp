#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "dpbench/dataset.hpp"

namespace dpbench {

// CSV layout: header `x,y,r,g,b` or `x,y,z,r,g,b`, comma separated, one
// record per line terminated by a single '\n'. Every value is written as the
// shortest decimal that parses back to the identical binary64.

/// Returns the number of records written. Empty datasets are rejected with
/// ValidationError; stream failures raise IoError.
std::size_t write_csv(const Dataset& dataset, std::ostream& sink);
std::size_t write_csv_file(const Dataset& dataset, const std::filesystem::path& path);

/// Reads records one line at a time. ParseError carries the 1-based line
/// number; a row whose column count disagrees with the header is a
/// SchemaError.
Dataset read_csv(std::istream& source, std::string name = "dataset");
Dataset read_csv_file(const std::filesystem::path& path);

/// Extracts every POSITION triple of every mesh primitive from a binary glTF
/// 2.0 container, widened to binary64. COLOR_0 (float or normalized
/// unsigned byte/short, VEC3 or VEC4) is used when present; otherwise the
/// default palette is applied.
Dataset extract_points_from_glb(std::span<const std::uint8_t> bytes, std::string name = "glb");
Dataset extract_points_from_glb(std::istream& source, std::string name = "glb");
Dataset extract_points_from_glb_file(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);

}  // namespace dpbench
