#pragma once

#include "mixed_spectra/geometry.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace mixed_spectra {

using Index = std::int64_t;

struct BoundaryEdge {
  std::array<Index, 2> nodes;
  std::size_t side;  // parent polygon side
};

/// Unique undirected edges of a triangulation. Edge k of element e joins
/// local vertices k and (k+1) mod 3.
struct MeshEdges {
  std::vector<std::array<Index, 2>> nodes;
  std::vector<std::array<Index, 3>> of_element;
};

/// Conforming triangulation of a polygon, counter-clockwise elements.
class Mesh {
 public:
  std::vector<Point> nodes;
  std::vector<std::array<Index, 3>> elements;
  std::vector<BoundaryEdge> boundary_edges;
  int level = 0;
  /// Vertices of the polygon the mesh was built from.
  std::vector<Point> source_vertices;

  [[nodiscard]] Index num_nodes() const { return static_cast<Index>(nodes.size()); }
  [[nodiscard]] Index num_elements() const { return static_cast<Index>(elements.size()); }
  [[nodiscard]] double element_area(Index e) const;
  /// Enumerates edges in order of first appearance (deterministic).
  [[nodiscard]] MeshEdges edges() const;
  /// Whether the mesh was generated from p's geometry (labels ignored).
  [[nodiscard]] bool references(const LabeledPolygon& p) const;
};

/// One element for triangles, centroid fan for n >= 4.
Mesh base_mesh(const LabeledPolygon& p);

/// Red refinement: every element split into four via edge midpoints.
Mesh refine_uniform(const Mesh& m);

/// base_mesh refined `level` times.
Mesh mesh_at_level(const LabeledPolygon& p, int level);

/// Maximum element circumdiameter.
double mesh_size(const Mesh& m);

/// Smallest interior angle over all elements.
double min_element_angle(const Mesh& m);

/// {"nodes": [[x,y]...], "elements": [[a,b,c]...],
///  "boundary_edges": [{"nodes": [a,b], "side": s}...], "level": k}
std::string mesh_to_json(const Mesh& m);

}  // namespace mixed_spectra
