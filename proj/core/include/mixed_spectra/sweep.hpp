#pragma once

#include "mixed_spectra/verify.hpp"

#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mixed_spectra {

enum class SweepTask {
  CorollaryI,
  CorollaryII,
  CorollaryIII,
  RightTriangle,
  /// Split inequality with each triangle side in turn as the Neumann side.
  Split,
  /// Split inequality on random convex polygons meeting the angle condition.
  Polygons,
};

const char* to_string(SweepTask task) noexcept;
SweepTask parse_sweep_task(std::string_view text);

struct SweepPoint {
  std::size_t index = 0;
  std::size_t i = 0;
  std::size_t j = 0;
  /// Grid parameters: the two angles, or (pi/2, beta), or (leg ratio, 0).
  double alpha = 0.0;
  double beta = 0.0;
  std::optional<TriangleSpec> triangle;
  std::optional<LabeledPolygon> polygon;
  std::size_t neumann_side = 0;
  std::string skip_reason;  // nonempty rows are not evaluated
};

/// n_alpha x n_beta cell-centre grid over [lo, hi]^2. Points whose third
/// angle pi - alpha - beta is not above `min_gamma` are marked skipped.
std::vector<SweepPoint> angle_grid(std::size_t n_alpha, std::size_t n_beta, double lo = 0.1,
                                   double hi = std::numbers::pi - 0.2, double min_gamma = 0.1);

/// Right triangles from angles (pi/2, beta), beta at cell centres of (lo, hi).
std::vector<SweepPoint> right_triangle_angle_family(std::size_t count, double beta_lo = 0.1,
                                                    double beta_hi = std::numbers::pi / 2 - 0.1);

/// Right triangles (0,0), (1,0), (0,r) with leg ratio r from lo to hi inclusive.
std::vector<SweepPoint> right_triangle_leg_family(std::size_t count, double ratio_lo = 1.0,
                                                  double ratio_hi = 10.0);

struct RandomPolygonOptions {
  std::size_t min_vertices = 4;
  std::size_t max_vertices = 5;
  /// Junction angles are at most pi/2 minus this.
  double junction_margin = 0.05;
  double min_interior_angle = 0.35;
  double min_side_ratio = 0.12;
};

/// Random convex polygons, each with a Neumann side whose two adjacent
/// angles are acute. Deterministic for a given seed on every platform.
std::vector<SweepPoint> random_split_polygons(std::size_t count, std::uint64_t seed,
                                              const RandomPolygonOptions& options = {});

struct SweepRow {
  SweepPoint point;
  std::string status;  // ok | skipped | error | aborted
  std::string message;
  std::vector<VerificationReport> reports;

  /// Smallest margin among reports whose hypothesis holds (all reports if none does).
  [[nodiscard]] std::optional<double> margin() const;
  /// Worst verdict among reports whose hypothesis holds; "NotMet" when none
  /// applies, or the row status when the row was not evaluated.
  [[nodiscard]] std::string verdict() const;
};

struct SweepSummary {
  std::size_t rows = 0;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
  std::size_t errors = 0;
  std::size_t aborted = 0;
  /// Verdict counts over reports with the hypothesis met.
  std::size_t confirmed = 0;
  std::size_t consistent = 0;
  std::size_t violations = 0;
  /// Reports whose hypothesis does not hold, by verdict.
  std::size_t unmet_reports = 0;
  std::size_t unmet_violations = 0;
  std::optional<double> min_margin;
};

struct SweepDataset {
  SweepTask task = SweepTask::CorollaryIII;
  std::vector<SweepRow> rows;
  SweepSummary summary;
  /// Set when a counterexample report stopped the sweep.
  bool aborted = false;
};

/// Evaluates every point. Rows keep the input order whatever the worker
/// count. A Violation with the hypothesis met stops further evaluation;
/// unevaluated rows are then marked aborted.
SweepDataset run_sweep(std::span<const SweepPoint> points, SweepTask task, const VerifyConfig& config,
                       unsigned threads = 1);

SweepSummary summarize(std::span<const SweepRow> rows);

}  // namespace mixed_spectra
