#include "mixed_spectra/mesh.hpp"

#include "mixed_spectra/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_map>

namespace mixed_spectra {

namespace {

std::uint64_t edge_key(Index a, Index b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
}

}  // namespace

double Mesh::element_area(Index e) const {
  const auto& t = elements[e];
  const Point u = nodes[t[1]] - nodes[t[0]];
  const Point v = nodes[t[2]] - nodes[t[0]];
  return 0.5 * (u.x() * v.y() - u.y() * v.x());
}

MeshEdges Mesh::edges() const {
  MeshEdges out;
  out.of_element.resize(elements.size());
  std::unordered_map<std::uint64_t, Index> lookup;
  lookup.reserve(elements.size() * 2);
  for (std::size_t e = 0; e < elements.size(); ++e) {
    const auto& t = elements[e];
    for (int k = 0; k < 3; ++k) {
      const Index a = t[k];
      const Index b = t[(k + 1) % 3];
      auto [it, inserted] = lookup.try_emplace(edge_key(a, b), static_cast<Index>(out.nodes.size()));
      if (inserted) out.nodes.push_back({std::min(a, b), std::max(a, b)});
      out.of_element[e][k] = it->second;
    }
  }
  return out;
}

bool Mesh::references(const LabeledPolygon& p) const {
  if (source_vertices.size() != p.size()) return false;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (source_vertices[i] != p.vertex(i)) return false;
  return true;
}

Mesh base_mesh(const LabeledPolygon& p) {
  Mesh m;
  const auto n = static_cast<Index>(p.size());
  m.source_vertices.assign(p.vertices().begin(), p.vertices().end());
  m.nodes = m.source_vertices;
  for (Index s = 0; s < n; ++s)
    m.boundary_edges.push_back({{s, (s + 1) % n}, static_cast<std::size_t>(s)});

  if (n == 3) {
    m.elements.push_back({0, 1, 2});
    return m;
  }
  Point centroid = Point::Zero();
  for (const auto& v : m.source_vertices) centroid += v;
  centroid /= static_cast<double>(n);
  m.nodes.push_back(centroid);
  for (Index s = 0; s < n; ++s) m.elements.push_back({s, (s + 1) % n, n});
  return m;
}

Mesh refine_uniform(const Mesh& m) {
  const MeshEdges edges = m.edges();
  const Index nv = m.num_nodes();

  Mesh r;
  r.level = m.level + 1;
  r.source_vertices = m.source_vertices;
  r.nodes = m.nodes;
  r.nodes.reserve(nv + edges.nodes.size());
  std::unordered_map<std::uint64_t, Index> midpoint;
  midpoint.reserve(edges.nodes.size());
  for (std::size_t k = 0; k < edges.nodes.size(); ++k) {
    const auto [a, b] = edges.nodes[k];
    r.nodes.emplace_back(0.5 * (m.nodes[a] + m.nodes[b]));
    midpoint.emplace(edge_key(a, b), nv + static_cast<Index>(k));
  }

  r.elements.reserve(4 * m.elements.size());
  for (std::size_t e = 0; e < m.elements.size(); ++e) {
    const auto [a, b, c] = m.elements[e];
    const Index ab = nv + edges.of_element[e][0];
    const Index bc = nv + edges.of_element[e][1];
    const Index ca = nv + edges.of_element[e][2];
    r.elements.push_back({a, ab, ca});
    r.elements.push_back({ab, b, bc});
    r.elements.push_back({ca, bc, c});
    r.elements.push_back({ab, bc, ca});
  }

  r.boundary_edges.reserve(2 * m.boundary_edges.size());
  for (const auto& be : m.boundary_edges) {
    const Index mid = midpoint.at(edge_key(be.nodes[0], be.nodes[1]));
    r.boundary_edges.push_back({{be.nodes[0], mid}, be.side});
    r.boundary_edges.push_back({{mid, be.nodes[1]}, be.side});
  }
  return r;
}

Mesh mesh_at_level(const LabeledPolygon& p, int level) {
  if (level < 0) throw Error(ErrorCode::ConfigError, "negative refinement level");
  Mesh m = base_mesh(p);
  for (int k = 0; k < level; ++k) m = refine_uniform(m);
  return m;
}

double mesh_size(const Mesh& m) {
  double h = 0.0;
  for (Index e = 0; e < m.num_elements(); ++e) {
    const auto& t = m.elements[e];
    const double a = (m.nodes[t[1]] - m.nodes[t[2]]).norm();
    const double b = (m.nodes[t[2]] - m.nodes[t[0]]).norm();
    const double c = (m.nodes[t[0]] - m.nodes[t[1]]).norm();
    h = std::max(h, a * b * c / (2.0 * m.element_area(e)));
  }
  return h;
}

double min_element_angle(const Mesh& m) {
  double best = std::numbers::pi;
  for (const auto& t : m.elements) {
    for (int k = 0; k < 3; ++k) {
      const Point u = m.nodes[t[(k + 1) % 3]] - m.nodes[t[k]];
      const Point v = m.nodes[t[(k + 2) % 3]] - m.nodes[t[k]];
      best = std::min(best, std::atan2(std::abs(u.x() * v.y() - u.y() * v.x()), u.dot(v)));
    }
  }
  return best;
}

std::string mesh_to_json(const Mesh& m) {
  nlohmann::json doc;
  doc["level"] = m.level;
  auto& nodes = doc["nodes"] = nlohmann::json::array();
  for (const auto& p : m.nodes) nodes.push_back({p.x(), p.y()});
  auto& elements = doc["elements"] = nlohmann::json::array();
  for (const auto& t : m.elements) elements.push_back({t[0], t[1], t[2]});
  auto& boundary = doc["boundary_edges"] = nlohmann::json::array();
  for (const auto& be : m.boundary_edges)
    boundary.push_back({{"nodes", {be.nodes[0], be.nodes[1]}}, {"side", be.side}});
  return doc.dump();
}

}  // namespace mixed_spectra
