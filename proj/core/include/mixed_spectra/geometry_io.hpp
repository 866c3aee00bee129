#pragma once

#include "mixed_spectra/geometry.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace mixed_spectra {

/// A parsed geometry document. Triangle input keeps its side roles.
struct GeometryInput {
  LabeledPolygon polygon;
  std::optional<TriangleSpec> triangle;
};

/// Accepts either
///   {"vertices": [[x,y],...], "labels": ["D"|"N",...]}
/// or the triangle shorthand
///   {"angles": [alpha, beta], "dirichlet": "S"|"M"|"L"|["S","M"]|...}
/// A three-vertex document may use "dirichlet" instead of "labels".
/// Throws Error(ParseError) on malformed input and geometry errors on
/// invalid shapes.
GeometryInput parse_geometry(std::string_view json_text);

GeometryInput load_geometry(const std::filesystem::path& file);

/// Inline JSON when the text starts with '{', otherwise a file path.
GeometryInput geometry_from_argument(const std::string& text);

std::string polygon_to_json(const LabeledPolygon& p);

}  // namespace mixed_spectra
