#include "mixed_spectra/geometry.hpp"

#include "mixed_spectra/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace mixed_spectra {

namespace {

constexpr double kPi = std::numbers::pi;

double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

double signed_area(std::span<const Point> v) {
  double twice = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) twice += cross(v[i], v[(i + 1) % v.size()]);
  return 0.5 * twice;
}

double diameter_of(std::span<const Point> v) {
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j) d = std::max(d, (v[i] - v[j]).norm());
  return d;
}

double angle_between(const Point& a, const Point& b) {
  return std::atan2(std::abs(cross(a, b)), a.dot(b));
}

}  // namespace

char to_char(SideLabel label) noexcept { return label == SideLabel::Dirichlet ? 'D' : 'N'; }

char to_char(SideRole role) noexcept {
  switch (role) {
    case SideRole::S: return 'S';
    case SideRole::M: return 'M';
    case SideRole::L: return 'L';
  }
  return '?';
}

LabeledPolygon make_polygon(std::vector<Point> vertices, std::vector<SideLabel> labels) {
  const std::size_t n = vertices.size();
  if (n != labels.size())
    throw Error(ErrorCode::SizeMismatch, "vertex and label lists differ in length");
  if (n < 3) throw Error(ErrorCode::SizeMismatch, "a polygon needs at least 3 vertices");
  for (const auto& v : vertices)
    if (!v.allFinite()) throw Error(ErrorCode::DegenerateEdge, "non-finite vertex coordinate");

  const double diam = diameter_of(vertices);
  for (std::size_t i = 0; i < n; ++i) {
    const double len = (vertices[(i + 1) % n] - vertices[i]).norm();
    if (!(len >= 1e-12 * diam) || diam == 0.0)
      throw Error(ErrorCode::DegenerateEdge, "side " + std::to_string(i) + " has length " +
                                                 std::to_string(len));
  }

  if (signed_area(vertices) < 0.0) {
    // Reverse the traversal; side k of the reversed polygon is old side n-1-k.
    std::vector<Point> v(n);
    std::vector<SideLabel> l(n);
    for (std::size_t k = 0; k < n; ++k) {
      v[k] = vertices[(n - k) % n];
      l[k] = labels[(2 * n - k - 1) % n];
    }
    vertices = std::move(v);
    labels = std::move(l);
  }

  double turning = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point e0 = vertices[i] - vertices[(i + n - 1) % n];
    const Point e1 = vertices[(i + 1) % n] - vertices[i];
    const double c = cross(e0, e1);
    if (!(c > 1e-12 * e0.norm() * e1.norm()))
      throw Error(ErrorCode::NonConvex, "turn at vertex " + std::to_string(i) +
                                            " is not strictly counter-clockwise");
    turning += std::atan2(c, e0.dot(e1));
  }
  if (std::abs(turning - 2.0 * kPi) > 1e-9)
    throw Error(ErrorCode::NonConvex, "boundary winds more than once");

  if (std::none_of(labels.begin(), labels.end(),
                   [](SideLabel l) { return l == SideLabel::Dirichlet; }))
    throw Error(ErrorCode::AllNeumann, "at least one side must carry a Dirichlet condition");

  return LabeledPolygon(std::move(vertices), std::move(labels));
}

double LabeledPolygon::side_length(std::size_t side) const {
  return (side_end(side) - side_start(side)).norm();
}

double LabeledPolygon::interior_angle(std::size_t i) const {
  const std::size_t n = size();
  const Point& here = vertices_[i % n];
  return angle_between(vertices_[(i + n - 1) % n] - here, vertices_[(i + 1) % n] - here);
}

double LabeledPolygon::area() const { return signed_area(vertices_); }

double LabeledPolygon::diameter() const { return diameter_of(vertices_); }

LabeledPolygon LabeledPolygon::with_labels(std::vector<SideLabel> labels) const {
  return make_polygon(vertices_, std::move(labels));
}

LabeledPolygon LabeledPolygon::with_dirichlet_sides(std::span<const std::size_t> sides) const {
  std::vector<SideLabel> labels(size(), SideLabel::Neumann);
  for (auto s : sides) {
    if (s >= size()) throw Error(ErrorCode::InvalidSide, "side " + std::to_string(s));
    labels[s] = SideLabel::Dirichlet;
  }
  return with_labels(std::move(labels));
}

LabeledPolygon LabeledPolygon::transformed(const Eigen::Matrix2d& a) const {
  std::vector<Point> v;
  v.reserve(size());
  for (const auto& p : vertices_) v.emplace_back(a * p);
  return make_polygon(std::move(v), labels_);
}

LabeledPolygon LabeledPolygon::scaled(double factor) const {
  return transformed(factor * Eigen::Matrix2d::Identity());
}

std::string LabeledPolygon::dirichlet_descriptor() const {
  std::ostringstream out;
  out << "D{";
  bool first = true;
  for (std::size_t i = 0; i < size(); ++i) {
    if (!is_dirichlet(i)) continue;
    if (!first) out << ',';
    out << i;
    first = false;
  }
  out << '}';
  return out.str();
}

// ---------------------------------------------------------------------------
// Triangles

RoleSet RoleSet::complement() const {
  RoleSet r;
  r.bits_ = ~bits_ & 0b111U;
  return r;
}

std::string RoleSet::to_string() const {
  std::string out;
  for (auto role : {SideRole::L, SideRole::M, SideRole::S}) {
    if (!contains(role)) continue;
    if (!out.empty()) out += '+';
    out += to_char(role);
  }
  return out.empty() ? "{}" : out;
}

RoleSet RoleSet::parse(std::string_view text) {
  RoleSet r;
  for (char c : text) {
    switch (c) {
      case 'S': case 's': r.bits_ |= bit(SideRole::S); break;
      case 'M': case 'm': r.bits_ |= bit(SideRole::M); break;
      case 'L': case 'l': r.bits_ |= bit(SideRole::L); break;
      case '+': case ',': case ' ': case '|': break;
      default:
        throw Error(ErrorCode::ParseError, "unknown side role '" + std::string(1, c) + "'");
    }
  }
  if (r.empty()) throw Error(ErrorCode::ParseError, "empty side role set");
  return r;
}

TriangleSpec::TriangleSpec(std::array<Point, 3> v) : vertices_(v) {
  if (cross(v[1] - v[0], v[2] - v[0]) < 0.0) std::swap(vertices_[1], vertices_[2]);
  const double area2 = cross(vertices_[1] - vertices_[0], vertices_[2] - vertices_[0]);
  const double diam = std::max({(v[0] - v[1]).norm(), (v[1] - v[2]).norm(), (v[2] - v[0]).norm()});
  if (!(area2 > 1e-12 * diam * diam))
    throw Error(ErrorCode::DegenerateEdge, "triangle vertices are collinear");

  std::array<double, 3> len{};
  for (std::size_t i = 0; i < 3; ++i) len[i] = (vertices_[(i + 1) % 3] - vertices_[i]).norm();
  std::array<std::size_t, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return len[a] < len[b]; });
  role_sides_ = order;
}

TriangleSpec TriangleSpec::from_vertices(Point a, Point b, Point c) {
  return TriangleSpec({a, b, c});
}

TriangleSpec TriangleSpec::from_angles(double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0) || !(alpha + beta < kPi))
    throw Error(ErrorCode::InvalidAngles, "need alpha > 0, beta > 0, alpha + beta < pi");
  const double gamma = kPi - alpha - beta;

  // (at (0,0), at (1,0), apex)
  std::array<double, 3> a{alpha, beta, gamma};
  if (alpha > gamma && alpha >= beta) a = {beta, gamma, alpha};
  else if (beta > gamma && beta > alpha) a = {gamma, alpha, beta};

  const double reach = std::sin(a[1]) / std::sin(a[2]);
  const Point apex(reach * std::cos(a[0]), reach * std::sin(a[0]));
  return TriangleSpec({Point(0.0, 0.0), Point(1.0, 0.0), apex});
}

SideRole TriangleSpec::role_of(std::size_t side) const {
  for (std::size_t r = 0; r < 3; ++r)
    if (role_sides_[r] == side) return static_cast<SideRole>(r);
  throw Error(ErrorCode::InvalidSide, "triangle side " + std::to_string(side));
}

double TriangleSpec::length(SideRole role) const {
  const std::size_t s = side(role);
  return (vertices_[(s + 1) % 3] - vertices_[s]).norm();
}

double TriangleSpec::angle(std::size_t i) const {
  const Point& here = vertices_[i % 3];
  return angle_between(vertices_[(i + 2) % 3] - here, vertices_[(i + 1) % 3] - here);
}

std::array<double, 2> TriangleSpec::enclosing_angles(SideRole role) const {
  const std::size_t s = side(role);
  return {angle(s), angle(s + 1)};
}

bool TriangleSpec::is_right(double tolerance) const {
  for (std::size_t i = 0; i < 3; ++i)
    if (std::abs(angle(i) - kPi / 2) <= tolerance) return true;
  return false;
}

LabeledPolygon TriangleSpec::polygon(RoleSet dirichlet) const {
  std::vector<SideLabel> labels(3, SideLabel::Neumann);
  for (std::size_t s = 0; s < 3; ++s)
    if (dirichlet.contains(role_of(s))) labels[s] = SideLabel::Dirichlet;
  return make_polygon({vertices_.begin(), vertices_.end()}, std::move(labels));
}

LabeledPolygon make_triangle(const TriangleSpec& spec, RoleSet dirichlet) {
  return spec.polygon(dirichlet);
}

// ---------------------------------------------------------------------------
// Hypotheses

std::vector<JunctionAngle> junction_angles(const LabeledPolygon& p) {
  std::vector<JunctionAngle> out;
  const std::size_t n = p.size();
  for (std::size_t v = 0; v < n; ++v) {
    if (p.label((v + n - 1) % n) != p.label(v)) out.push_back({v, p.interior_angle(v)});
  }
  return out;
}

bool junctions_acute(const LabeledPolygon& p, double epsilon) {
  const auto junctions = junction_angles(p);
  return std::all_of(junctions.begin(), junctions.end(),
                     [&](const JunctionAngle& j) { return j.angle < kPi / 2 - epsilon; });
}

AngleCondition angle_condition(const LabeledPolygon& p, double epsilon) {
  AngleCondition c;
  std::size_t neumann_count = 0;
  for (std::size_t s = 0; s < p.size(); ++s) {
    if (p.is_dirichlet(s)) continue;
    ++neumann_count;
    c.neumann_side = s;
  }
  if (neumann_count != 1) c.neumann_side.reset();
  c.single_neumann_side = neumann_count == 1;
  c.junctions = junction_angles(p);
  c.junctions_acute = !c.junctions.empty() && junctions_acute(p, epsilon);
  return c;
}

std::string AngleCondition::reason() const {
  if (holds()) return "";
  std::ostringstream out;
  if (!single_neumann_side) out << "Neumann part is not a single side";
  if (!junctions_acute) {
    if (!single_neumann_side) out << "; ";
    if (junctions.empty()) {
      out << "no Dirichlet/Neumann junction";
    } else {
      out << "junction angle not below pi/2:";
      for (const auto& j : junctions) out << " v" << j.vertex << '=' << j.angle;
    }
  }
  return out.str();
}

AlignedPolygon align_neumann_side(const LabeledPolygon& p, std::size_t side) {
  if (side >= p.size()) throw Error(ErrorCode::InvalidSide, "side " + std::to_string(side));
  const Point d = p.side_end(side) - p.side_start(side);
  double theta = kPi / 2 - std::atan2(d.y(), d.x());
  // Reduce modulo pi into (-pi/2, pi/2]: a side is vertical in either direction.
  theta = std::remainder(theta, kPi);
  if (theta <= -kPi / 2) theta += kPi;
  Rotation r;
  if (theta == 0.0) {
    r.setIdentity();
  } else {
    r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  }
  return {r, p.transformed(r)};
}

}  // namespace mixed_spectra
