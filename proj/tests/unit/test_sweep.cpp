#include "support.hpp"

#include <mixed_spectra/error.hpp>
#include <mixed_spectra/report.hpp>
#include <mixed_spectra/sweep.hpp>

#include <gtest/gtest.h>

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace mixed_spectra;

namespace {

VerifyConfig quick() {
  VerifyConfig c;
  c.levels = {1, 3};
  return c;
}

std::string sweep_csv(const SweepDataset& d) {
  std::ostringstream s;
  write_sweep_csv(s, d);
  return s.str();
}

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST(AngleGrid, CellCentresAndSkips) {
  const auto grid = angle_grid(20, 20);
  ASSERT_EQ(grid.size(), 400U);
  std::size_t skipped = 0;
  for (const auto& p : grid) {
    if (!p.skip_reason.empty()) {
      ++skipped;
      EXPECT_FALSE(p.triangle);
      EXPECT_LE(std::numbers::pi - p.alpha - p.beta, 0.1);
    } else {
      ASSERT_TRUE(p.triangle);
    }
  }
  EXPECT_EQ(skipped, 192U);
  EXPECT_EQ(grid[21].i, 1U);
  EXPECT_EQ(grid[21].j, 1U);
}

TEST(RandomPolygons, DeterministicAndAdmissible) {
  const auto a = random_split_polygons(30, 42);
  const auto b = random_split_polygons(30, 42);
  ASSERT_EQ(a.size(), 30U);
  for (std::size_t k = 0; k < a.size(); ++k) {
    ASSERT_TRUE(a[k].polygon);
    EXPECT_EQ(a[k].polygon->size(), k % 2 ? 5U : 4U);
    for (std::size_t v = 0; v < a[k].polygon->size(); ++v)
      EXPECT_EQ(a[k].polygon->vertex(v), b[k].polygon->vertex(v));
    EXPECT_TRUE(angle_condition_holds(*a[k].polygon));
    EXPECT_EQ(*angle_condition(*a[k].polygon).neumann_side, a[k].neumann_side);
  }
  EXPECT_NE(random_split_polygons(1, 43)[0].polygon->vertex(0), a[0].polygon->vertex(0));
}

TEST(RightFamilies, LegRatiosAndAngles) {
  const auto legs = right_triangle_leg_family(10);
  EXPECT_DOUBLE_EQ(legs.front().alpha, 1.0);
  EXPECT_DOUBLE_EQ(legs.back().alpha, 10.0);
  for (const auto& p : legs) EXPECT_TRUE(p.triangle->is_right(1e-12));
  for (const auto& p : right_triangle_angle_family(5)) EXPECT_TRUE(p.triangle->is_right(1e-12));
}

TEST(RunSweep, IndependentOfWorkerCount) {
  const auto points = angle_grid(4, 4);
  const auto one = run_sweep(points, SweepTask::CorollaryIII, quick(), 1);
  const auto three = run_sweep(points, SweepTask::CorollaryIII, quick(), 3);
  EXPECT_EQ(sweep_csv(one), sweep_csv(three));
  EXPECT_EQ(one.summary.violations, 0U);
  EXPECT_FALSE(one.aborted);
  EXPECT_EQ(one.summary.evaluated + one.summary.skipped, 16U);
}

TEST(RunSweep, SplitChecksEverySide) {
  const auto points = angle_grid(2, 2);
  const auto d = run_sweep(points, SweepTask::Split, quick());
  for (const auto& row : d.rows)
    if (row.status == "ok") EXPECT_EQ(row.reports.size(), 3U);
}

TEST(RandomTriangles, LongestSideInequality) {
  // Corollary (iii) on 1000 random triangles at coarse levels.
  test::Uniform u(2024);
  std::vector<SweepPoint> points;
  while (points.size() < 1000) {
    const double a = u(0.05, 3.0), b = u(0.05, 3.0);
    if (a + b > std::numbers::pi - 0.05) continue;
    SweepPoint p;
    p.index = points.size();
    p.alpha = a;
    p.beta = b;
    p.triangle = TriangleSpec::from_angles(a, b);
    points.push_back(std::move(p));
  }
  VerifyConfig c;
  c.levels = {0, 2};
  const auto d = run_sweep(points, SweepTask::CorollaryIII, c);
  EXPECT_EQ(d.summary.errors, 0U);
  EXPECT_EQ(d.summary.violations, 0U);
  EXPECT_EQ(d.summary.evaluated, 1000U);
}

TEST(Summary, CountsOnlyMetViolations) {
  SweepRow row;
  row.status = "ok";
  VerificationReport met, unmet;
  met.hypothesis.met = true;
  met.verdict = Verdict::ConsistentWithinError;
  met.margin = -0.1;
  unmet.verdict = Verdict::Violation;
  unmet.margin = -5;
  row.reports = {met, unmet};
  const auto s = summarize(std::vector<SweepRow>{row});
  EXPECT_EQ(s.violations, 0U);
  EXPECT_EQ(s.unmet_violations, 1U);
  EXPECT_EQ(s.consistent, 1U);
  EXPECT_DOUBLE_EQ(*row.margin(), -0.1);
  EXPECT_EQ(row.verdict(), "ConsistentWithinError");
}

TEST(PlotData, FormatContract) {
  SweepDataset empty;
  std::ostringstream e;
  write_plot_csv(e, empty);
  EXPECT_EQ(e.str(), "alpha,beta,margin,verdict\n");

  const auto d = run_sweep(angle_grid(4, 4), SweepTask::CorollaryIII, quick());
  std::ostringstream s;
  write_plot_csv(s, d);
  EXPECT_EQ(lines(s.str()), 17U);
  EXPECT_NE(s.str().find(",skipped\n"), std::string::npos);
  EXPECT_NE(s.str().find(",ConfirmedWithMargin\n"), std::string::npos);
  // The report CSV leaves skipped rows out.
  EXPECT_EQ(lines(sweep_csv(d)), 1 + d.summary.evaluated);
}

TEST(Report, JsonRoundTripsNumbers) {
  const auto d = run_sweep(angle_grid(2, 2), SweepTask::CorollaryIII, quick());
  const auto j = nlohmann::json::parse(to_json(d));
  EXPECT_EQ(j["task"], "corollary-iii");
  EXPECT_EQ(j["rows"].size(), 4U);
  for (std::size_t k = 0; k < d.rows.size(); ++k) {
    if (d.rows[k].status != "ok") continue;
    EXPECT_EQ(j["rows"][k]["reports"][0]["margin"].get<double>(), d.rows[k].reports[0].margin);
  }
}

TEST(Report, FormatDoubleIsShortestRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, 2.4674011002723395, 1e-300, -7.25}) EXPECT_EQ(std::stod(format_double(v)), v);
  EXPECT_EQ(format_double(0.5), "0.5");
}

TEST(Report, AtomicWrite) {
  const auto path = std::filesystem::temp_directory_path() / "mixed_spectra_atomic_test.txt";
  write_file_atomic(path, "one\n");
  write_file_atomic(path, "two\n");
  std::ifstream in(path);
  std::string s;
  std::getline(in, s);
  EXPECT_EQ(s, "two");
  EXPECT_FALSE(std::filesystem::exists(path.string() + ".tmp"));
  std::filesystem::remove(path);
  EXPECT_THROW(write_file_atomic("/nonexistent-dir/x.csv", "x"), Error);
}
