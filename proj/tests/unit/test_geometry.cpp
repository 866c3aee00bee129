#include "support.hpp"

#include <mixed_spectra/error.hpp>
#include <mixed_spectra/geometry_io.hpp>

#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

using namespace mixed_spectra;
using mixed_spectra::test::labels_from;

namespace {

constexpr double kPi = std::numbers::pi;

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Internal;
}

}  // namespace

TEST(Polygon, RejectsInvalidInput) {
  EXPECT_EQ(code_of([] { make_polygon({Point(0, 0), Point(1, 0), Point(0, 1)}, labels_from("DD")); }),
            ErrorCode::SizeMismatch);
  EXPECT_EQ(code_of([] {
              make_polygon({Point(0, 0), Point(2, 0), Point(1, 0.3), Point(1, 2)}, labels_from("DDDD"));
            }),
            ErrorCode::NonConvex);
  EXPECT_EQ(code_of([] {
              make_polygon({Point(0, 0), Point(1, 0), Point(2, 0), Point(1, 1)}, labels_from("DDDD"));
            }),
            ErrorCode::NonConvex);
  EXPECT_EQ(code_of([] {
              make_polygon({Point(0, 0), Point(1, 0), Point(1, 0), Point(0, 1)}, labels_from("DDDD"));
            }),
            ErrorCode::DegenerateEdge);
  EXPECT_EQ(code_of([] { make_polygon({Point(0, 0), Point(1, 0), Point(0, 1)}, labels_from("NNN")); }),
            ErrorCode::AllNeumann);
}

TEST(Polygon, ClockwiseInputKeepsLabelsOnTheirSides) {
  // Clockwise square with Neumann on the side from (1,1) to (1,0).
  const auto p = make_polygon({Point(0, 0), Point(0, 1), Point(1, 1), Point(1, 0)}, labels_from("DDND"));
  ASSERT_EQ(p.size(), 4U);
  EXPECT_GT(p.area(), 0.0);
  for (std::size_t s = 0; s < 4; ++s) {
    const bool on_right = p.side_start(s).x() == 1.0 && p.side_end(s).x() == 1.0;
    EXPECT_EQ(p.is_dirichlet(s), !on_right) << s;
  }
}

TEST(Polygon, MeasuresTheUnitSquare) {
  const auto p = test::unit_square("DNDN");
  EXPECT_DOUBLE_EQ(p.area(), 1.0);
  EXPECT_DOUBLE_EQ(p.diameter(), std::sqrt(2.0));
  for (std::size_t v = 0; v < 4; ++v) EXPECT_NEAR(p.interior_angle(v), kPi / 2, 1e-15);
  EXPECT_EQ(p.dirichlet_descriptor(), "D{0,2}");
}

TEST(RoleSet, ParsesAndPrints) {
  EXPECT_EQ(RoleSet::parse("s+m").to_string(), "M+S");
  EXPECT_EQ(RoleSet::parse("L").to_string(), "L");
  EXPECT_EQ(RoleSet::parse("S, L").complement().to_string(), "M");
  EXPECT_THROW(RoleSet::parse("Q"), Error);
}

TEST(Triangle, RolesFollowSideLengths) {
  const auto t = TriangleSpec::from_vertices(Point(0, 0), Point(3, 0), Point(0, 4));
  EXPECT_DOUBLE_EQ(t.length(SideRole::S), 3.0);
  EXPECT_DOUBLE_EQ(t.length(SideRole::M), 4.0);
  EXPECT_DOUBLE_EQ(t.length(SideRole::L), 5.0);
  EXPECT_TRUE(t.is_right(1e-12));
}

TEST(Triangle, RolesAreStableUnderVertexRotation) {
  const Point a(0.1, 0.2), b(2.3, -0.4), c(0.9, 1.7);
  const auto t0 = TriangleSpec::from_vertices(a, b, c);
  const auto t1 = TriangleSpec::from_vertices(b, c, a);
  const auto t2 = TriangleSpec::from_vertices(c, b, a);  // clockwise
  for (auto r : {SideRole::S, SideRole::M, SideRole::L}) {
    EXPECT_DOUBLE_EQ(t0.length(r), t1.length(r));
    EXPECT_DOUBLE_EQ(t0.length(r), t2.length(r));
  }
}

TEST(Triangle, FromAnglesPutsTheLongestSideOnTheUnitBase) {
  for (auto [a, b] : {std::pair{0.5, 0.7}, std::pair{1.9, 0.3}, std::pair{0.4, 2.2}, std::pair{kPi / 2, kPi / 4}}) {
    const auto t = TriangleSpec::from_angles(a, b);
    EXPECT_NEAR(t.length(SideRole::L), 1.0, 1e-14);
    std::vector<double> want{a, b, kPi - a - b};
    std::vector<double> got{t.angle(0), t.angle(1), t.angle(2)};
    std::sort(want.begin(), want.end());
    std::sort(got.begin(), got.end());
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(got[k], want[k], 1e-12);
  }
  EXPECT_THROW(TriangleSpec::from_angles(1.0, 2.5), Error);
  EXPECT_THROW(TriangleSpec::from_angles(0.0, 1.0), Error);
}

TEST(Triangle, AnglesAtTheLongestSideAreAcute) {
  test::Uniform u(7);
  for (int k = 0; k < 10000; ++k) {
    const auto t = TriangleSpec::from_vertices(Point(u(), u()), Point(u(), u()), Point(u(), u()));
    for (double angle : t.enclosing_angles(SideRole::L)) ASSERT_LT(angle, kPi / 2) << k;
  }
}

TEST(AngleCondition, DetectsRightJunctions) {
  const auto square = test::unit_square("NDDD");
  const auto c = angle_condition(square);
  EXPECT_TRUE(c.single_neumann_side);
  EXPECT_FALSE(c.junctions_acute);
  EXPECT_FALSE(c.holds());
  EXPECT_FALSE(c.reason().empty());

  const auto tri = test::polygon({Point(0, 0), Point(1, 0), Point(0.5, 0.8)}, "NDD");
  EXPECT_TRUE(angle_condition_holds(tri));
  EXPECT_EQ(*angle_condition(tri).neumann_side, 0U);
  EXPECT_FALSE(angle_condition_holds(test::polygon({Point(0, 0), Point(1, 0), Point(0.5, 0.8)}, "NND")));
  EXPECT_TRUE(junctions_acute(test::unit_square("DDDD")));
}

TEST(AngleCondition, JunctionCountIsEven) {
  test::Uniform u(11);
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = 4 + k % 3;
    std::vector<double> theta(n);
    for (auto& t : theta) t = 2 * kPi * u();
    std::sort(theta.begin(), theta.end());
    std::vector<Point> pts;
    for (double t : theta) pts.emplace_back(std::cos(t), std::sin(t));
    std::vector<SideLabel> labels(n);
    for (auto& l : labels) l = u() < 0.5 ? SideLabel::Dirichlet : SideLabel::Neumann;
    labels[0] = SideLabel::Dirichlet;
    try {
      const auto p = make_polygon(pts, labels);
      EXPECT_EQ(junction_angles(p).size() % 2, 0U);
    } catch (const Error&) {
      // near-degenerate random sample
    }
  }
}

TEST(Align, MakesTheSideVerticalAndPreservesDistances) {
  const auto p = test::polygon({Point(0, 0), Point(2, 0.3), Point(1.6, 1.2), Point(0.3, 1.0)}, "NDDD");
  for (std::size_t side = 0; side < 4; ++side) {
    const auto a = align_neumann_side(p, side);
    const Point d = a.polygon.side_end(side) - a.polygon.side_start(side);
    EXPECT_NEAR(d.x(), 0.0, 1e-12);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j)
        EXPECT_NEAR((a.polygon.vertex(i) - a.polygon.vertex(j)).norm(), (p.vertex(i) - p.vertex(j)).norm(),
                    1e-12);
    EXPECT_NEAR(a.rotation.determinant(), 1.0, 1e-14);
  }
  const auto vertical = test::polygon({Point(0, 0), Point(1, 0), Point(1, 1), Point(0, 1)}, "DNDD");
  EXPECT_TRUE(align_neumann_side(vertical, 1).rotation.isIdentity());
}

TEST(GeometryIo, ParsesAllForms) {
  const auto a = parse_geometry(R"({"vertices": [[0,0],[1,0],[1,1],[0,1]], "labels": ["D","N","D","N"]})");
  EXPECT_EQ(a.polygon.dirichlet_descriptor(), "D{0,2}");
  EXPECT_FALSE(a.triangle);

  const auto b = parse_geometry(R"({"angles": [1.0, 0.9], "dirichlet": ["S", "M"]})");
  ASSERT_TRUE(b.triangle);
  EXPECT_TRUE(b.polygon.is_dirichlet(b.triangle->side(SideRole::S)));
  EXPECT_FALSE(b.polygon.is_dirichlet(b.triangle->side(SideRole::L)));

  const auto c = parse_geometry(R"({"vertices": [[0,0],[3,0],[0,4]], "dirichlet": "L"})");
  EXPECT_TRUE(c.polygon.is_dirichlet(c.triangle->side(SideRole::L)));

  EXPECT_THROW(parse_geometry("{"), Error);
  EXPECT_THROW(parse_geometry(R"({"vertices": [[0,0],[1,0],[1,1]]})"), Error);
  EXPECT_THROW(parse_geometry(R"({"vertices": [[0,0],[1,0],[1,1]], "labels": ["D","X","D"]})"), Error);

  const auto round = parse_geometry(polygon_to_json(a.polygon));
  EXPECT_EQ(round.polygon.dirichlet_descriptor(), "D{0,2}");
}
