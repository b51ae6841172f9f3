#pragma once

// File formats: map JSON, vertex/face CSV, boundary CSV.  Numbers are
// written with 17 significant digits independent of the locale.

#include <filesystem>
#include <string>
#include <string_view>

#include "dch/calculus.hpp"
#include "dch/holomorphy.hpp"

namespace dch {

std::string format_double(double x);
double parse_double(std::string_view text);

/// Accepts `a,b`, `a+bi`, `a-bi`, `bi` and plain reals.
Complex parse_complex(std::string_view text);

std::string map_to_json(const CriticalMap& map);
MapPtr map_from_json(std::string_view text);

/// `vertex_id,re,im`, one row per vertex in id order.
std::string function_to_csv(const VertexFunction& f);
/// Every vertex must appear exactly once.
VertexFunction function_from_csv(const MapPtr& map, std::string_view text);

/// `vertex_id,re,im` rows for a subset of vertices.
BoundarySpec boundary_from_csv(const CriticalMap& map, std::string_view text);

/// `quad_index,re,im`.
std::string faces_to_csv(const FaceFunction& a);

std::string read_file(const std::filesystem::path& path);
/// Writes to a sibling temporary file, then renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

MapPtr load_map(const std::filesystem::path& path);

}  // namespace dch
