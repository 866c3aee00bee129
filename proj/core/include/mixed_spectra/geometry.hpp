#pragma once

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mixed_spectra {

using Point = Eigen::Vector2d;
using Rotation = Eigen::Matrix2d;

enum class SideLabel { Dirichlet, Neumann };

char to_char(SideLabel label) noexcept;

/// Default strictness tolerance for "angle < pi/2" tests, in radians.
inline constexpr double kDefaultAngleEpsilon = 1e-9;

/// A strictly convex polygon whose sides carry Dirichlet/Neumann labels.
///
/// Vertices are stored counter-clockwise; side i joins vertex i to vertex
/// (i + 1) mod n. The Dirichlet part of the boundary is the union of the
/// Dirichlet sides and is never empty. Instances are immutable.
class LabeledPolygon {
 public:
  [[nodiscard]] std::size_t size() const noexcept { return vertices_.size(); }
  [[nodiscard]] std::span<const Point> vertices() const noexcept { return vertices_; }
  [[nodiscard]] std::span<const SideLabel> labels() const noexcept { return labels_; }

  [[nodiscard]] const Point& vertex(std::size_t i) const { return vertices_[i % size()]; }
  [[nodiscard]] SideLabel label(std::size_t side) const { return labels_.at(side); }
  [[nodiscard]] bool is_dirichlet(std::size_t side) const {
    return label(side) == SideLabel::Dirichlet;
  }

  [[nodiscard]] const Point& side_start(std::size_t side) const { return vertex(side); }
  [[nodiscard]] const Point& side_end(std::size_t side) const { return vertex(side + 1); }
  [[nodiscard]] double side_length(std::size_t side) const;

  /// Interior angle at vertex i, between sides i-1 and i.
  [[nodiscard]] double interior_angle(std::size_t vertex) const;

  [[nodiscard]] double area() const;
  [[nodiscard]] double diameter() const;

  /// Same geometry, new labels (validated).
  [[nodiscard]] LabeledPolygon with_labels(std::vector<SideLabel> labels) const;
  /// Dirichlet on exactly the listed sides, Neumann elsewhere.
  [[nodiscard]] LabeledPolygon with_dirichlet_sides(std::span<const std::size_t> sides) const;
  /// Image under x -> a * x (a must be a rotation times a positive scale).
  [[nodiscard]] LabeledPolygon transformed(const Eigen::Matrix2d& a) const;
  [[nodiscard]] LabeledPolygon scaled(double factor) const;

  /// Compact descriptor of the Dirichlet set, e.g. "D{0,2}".
  [[nodiscard]] std::string dirichlet_descriptor() const;

  friend LabeledPolygon make_polygon(std::vector<Point> vertices, std::vector<SideLabel> labels);

 private:
  LabeledPolygon(std::vector<Point> vertices, std::vector<SideLabel> labels)
      : vertices_(std::move(vertices)), labels_(std::move(labels)) {}

  std::vector<Point> vertices_;
  std::vector<SideLabel> labels_;
};

/// Validates and builds a labeled polygon. Clockwise input is reoriented;
/// the labels follow their sides, so side indices refer to the stored
/// counter-clockwise order afterwards.
///
/// Throws Error with SizeMismatch, DegenerateEdge, NonConvex or AllNeumann.
LabeledPolygon make_polygon(std::vector<Point> vertices, std::vector<SideLabel> labels);

/// Sides of a triangle ordered by nondecreasing length.
enum class SideRole { S = 0, M = 1, L = 2 };

char to_char(SideRole role) noexcept;

/// Subset of {S, M, L}, used to name Dirichlet sets on triangles.
class RoleSet {
 public:
  constexpr RoleSet() = default;
  constexpr RoleSet(std::initializer_list<SideRole> roles) {
    for (auto r : roles) bits_ |= bit(r);
  }
  [[nodiscard]] constexpr bool contains(SideRole r) const { return (bits_ & bit(r)) != 0; }
  [[nodiscard]] constexpr bool empty() const { return bits_ == 0; }
  [[nodiscard]] RoleSet complement() const;
  /// "L", "M+S", ... with roles listed L, M, S.
  [[nodiscard]] std::string to_string() const;
  /// Parses "S", "L", "M+S", "MS", "S,M" (order and separators free).
  static RoleSet parse(std::string_view text);

  friend constexpr bool operator==(RoleSet, RoleSet) = default;

 private:
  static constexpr unsigned bit(SideRole r) { return 1U << static_cast<unsigned>(r); }
  unsigned bits_ = 0;
};

/// A triangle with its S/M/L side roles resolved.
class TriangleSpec {
 public:
  /// Any three non-collinear points; reoriented counter-clockwise.
  static TriangleSpec from_vertices(Point a, Point b, Point c);

  /// Interior angles alpha, beta (radians), gamma = pi - alpha - beta.
  /// The largest of the three angles is placed at the apex so that the
  /// side (0,0)-(1,0) is the longest side with length 1. When gamma is
  /// (one of) the largest, alpha sits at (0,0) and beta at (1,0);
  /// otherwise the three angles are rotated cyclically.
  ///
  /// Throws InvalidAngles unless alpha > 0, beta > 0, alpha + beta < pi.
  static TriangleSpec from_angles(double alpha, double beta);

  [[nodiscard]] const std::array<Point, 3>& vertices() const noexcept { return vertices_; }
  /// Side index (0..2) carrying a given role.
  [[nodiscard]] std::size_t side(SideRole role) const {
    return role_sides_[static_cast<std::size_t>(role)];
  }
  [[nodiscard]] SideRole role_of(std::size_t side) const;
  [[nodiscard]] double length(SideRole role) const;
  /// Interior angle at vertex i.
  [[nodiscard]] double angle(std::size_t vertex) const;
  /// Angles at the two endpoints of a side.
  [[nodiscard]] std::array<double, 2> enclosing_angles(SideRole role) const;
  [[nodiscard]] bool is_right(double tolerance) const;

  /// Polygon on this triangle with Dirichlet exactly on the given roles.
  [[nodiscard]] LabeledPolygon polygon(RoleSet dirichlet) const;

 private:
  explicit TriangleSpec(std::array<Point, 3> vertices);

  std::array<Point, 3> vertices_;
  std::array<std::size_t, 3> role_sides_{};
};

/// Builds the labeled polygon for a triangle spec (see TriangleSpec::polygon).
LabeledPolygon make_triangle(const TriangleSpec& spec, RoleSet dirichlet);

struct JunctionAngle {
  std::size_t vertex;
  double angle;
};

/// Interior angles at vertices where a Dirichlet side meets a Neumann side,
/// in increasing vertex order.
std::vector<JunctionAngle> junction_angles(const LabeledPolygon& p);

struct AngleCondition {
  /// The Neumann part consists of exactly one side.
  bool single_neumann_side = false;
  /// Every junction angle is below pi/2 - epsilon (false when there is none).
  bool junctions_acute = false;
  std::optional<std::size_t> neumann_side;
  std::vector<JunctionAngle> junctions;

  [[nodiscard]] bool holds() const noexcept { return single_neumann_side && junctions_acute; }
  [[nodiscard]] std::string reason() const;
};

/// Evaluates both sub-conditions of the split inequality's hypothesis.
AngleCondition angle_condition(const LabeledPolygon& p, double epsilon = kDefaultAngleEpsilon);

inline bool angle_condition_holds(const LabeledPolygon& p,
                                  double epsilon = kDefaultAngleEpsilon) {
  return angle_condition(p, epsilon).holds();
}

/// True iff every junction angle is below pi/2 - epsilon (vacuous when the
/// boundary carries a single label). This is the H2-regularity hypothesis.
bool junctions_acute(const LabeledPolygon& p, double epsilon = kDefaultAngleEpsilon);

struct AlignedPolygon {
  Rotation rotation;
  LabeledPolygon polygon;
};

/// Rotation about the origin, by the smallest angle in (-pi/2, pi/2], that
/// makes the given side parallel to the x2-axis.
AlignedPolygon align_neumann_side(const LabeledPolygon& p, std::size_t side);

}  // namespace mixed_spectra
