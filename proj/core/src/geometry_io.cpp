#include "mixed_spectra/geometry_io.hpp"

#include "mixed_spectra/error.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace mixed_spectra {

namespace {

using nlohmann::json;

SideLabel parse_label(const json& j) {
  const auto s = j.get<std::string>();
  if (s == "D" || s == "d" || s == "Dirichlet") return SideLabel::Dirichlet;
  if (s == "N" || s == "n" || s == "Neumann") return SideLabel::Neumann;
  throw Error(ErrorCode::ParseError, "label must be \"D\" or \"N\", got \"" + s + "\"");
}

RoleSet parse_roles(const json& j) {
  if (j.is_string()) return RoleSet::parse(j.get<std::string>());
  if (j.is_array()) {
    std::string joined;
    for (const auto& r : j) joined += r.get<std::string>() + ",";
    return RoleSet::parse(joined);
  }
  throw Error(ErrorCode::ParseError, "\"dirichlet\" must be a role string or an array of roles");
}

std::vector<Point> parse_points(const json& j) {
  if (!j.is_array()) throw Error(ErrorCode::ParseError, "\"vertices\" must be an array");
  std::vector<Point> points;
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2)
      throw Error(ErrorCode::ParseError, "each vertex must be [x, y]");
    points.emplace_back(p[0].get<double>(), p[1].get<double>());
  }
  return points;
}

GeometryInput from_json(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::ParseError, "geometry must be a JSON object");

  if (doc.contains("angles")) {
    const auto& a = doc.at("angles");
    if (!a.is_array() || a.size() != 2)
      throw Error(ErrorCode::ParseError, "\"angles\" must be [alpha, beta]");
    auto tri = TriangleSpec::from_angles(a[0].get<double>(), a[1].get<double>());
    const RoleSet roles = doc.contains("dirichlet") ? parse_roles(doc.at("dirichlet"))
                                                   : RoleSet{SideRole::L};
    return {tri.polygon(roles), tri};
  }

  if (!doc.contains("vertices"))
    throw Error(ErrorCode::ParseError, "geometry needs \"vertices\" or \"angles\"");
  auto points = parse_points(doc.at("vertices"));

  if (doc.contains("labels")) {
    std::vector<SideLabel> labels;
    for (const auto& l : doc.at("labels")) labels.push_back(parse_label(l));
    auto poly = make_polygon(points, std::move(labels));
    std::optional<TriangleSpec> tri;
    if (points.size() == 3) tri = TriangleSpec::from_vertices(points[0], points[1], points[2]);
    return {std::move(poly), tri};
  }
  if (doc.contains("dirichlet")) {
    if (points.size() != 3)
      throw Error(ErrorCode::ParseError, "\"dirichlet\" roles require exactly three vertices");
    auto tri = TriangleSpec::from_vertices(points[0], points[1], points[2]);
    return {tri.polygon(parse_roles(doc.at("dirichlet"))), tri};
  }
  throw Error(ErrorCode::ParseError, "polygon geometry needs \"labels\"");
}

}  // namespace

GeometryInput parse_geometry(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
    return from_json(doc);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

GeometryInput load_geometry(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + file.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_geometry(text.str());
}

GeometryInput geometry_from_argument(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return parse_geometry(text);
  return load_geometry(text);
}

std::string polygon_to_json(const LabeledPolygon& p) {
  json doc;
  doc["vertices"] = json::array();
  doc["labels"] = json::array();
  for (std::size_t i = 0; i < p.size(); ++i) {
    doc["vertices"].push_back({p.vertex(i).x(), p.vertex(i).y()});
    doc["labels"].push_back(std::string(1, to_char(p.label(i))));
  }
  return doc.dump();
}

}  // namespace mixed_spectra
