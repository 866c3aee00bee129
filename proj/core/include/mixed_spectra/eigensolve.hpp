#pragma once

#include "mixed_spectra/fem.hpp"
#include "mixed_spectra/geometry.hpp"

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mixed_spectra {

enum class SolverMethod {
  Auto,          // shift-invert, dense fallback below the threshold
  ShiftInvert,
  Dense,
};

const char* to_string(SolverMethod method) noexcept;

/// Default cap on refinement levels; MIXED_SPECTRA_MAX_LEVEL overrides it.
inline constexpr int kDefaultMaxLevel = 8;

/// The level cap in effect: MIXED_SPECTRA_MAX_LEVEL when set, else `configured`.
int effective_level_cap(int configured = kDefaultMaxLevel);

struct SolverConfig {
  /// Relative residual target. Raised to ten times the rounding floor
  /// eps ||K||_1 / (lambda ||M||_1) when that is larger (thin, fine meshes).
  double tol = 1e-10;
  int max_iter = 500;
  int max_level = kDefaultMaxLevel;
  Index dense_threshold = 2000;
  SolverMethod method = SolverMethod::Auto;
  /// Relative residual below which the outer loop switches from shift 0
  /// to a fixed shift at the current Rayleigh quotient.
  double acceleration_threshold = 1e-3;
};

struct EigenResult {
  double eigenvalue;
  DiscreteFunction eigenvector;
  /// ||K u - lambda M u|| / (lambda ||M u||), Euclidean norms on free dofs.
  double residual = 0.0;
  /// Tolerance actually applied (see SolverConfig::tol).
  double tolerance = 0.0;
  int iterations = 0;
  int mesh_level = 0;
  SolverMethod method = SolverMethod::Auto;
};

/// Smallest eigenpair of K u = lambda M u by shift-invert inverse iteration.
///
/// The start vector is all ones on the free dofs. The returned eigenvector
/// is M-normalized and its largest-magnitude coefficient is positive.
/// Throws NotConverged or SingularStiffness.
EigenResult smallest_eigenpair(const FemSystem& sys, const SolverConfig& config = {});

/// The `count` smallest eigenpairs (count <= 5), by M-orthogonal deflation.
std::vector<EigenResult> smallest_eigenpairs(const FemSystem& sys, int count,
                                             const SolverConfig& config = {});

/// Contiguous range of refinement levels, inclusive.
struct LevelRange {
  int first = 3;
  int last = 6;

  [[nodiscard]] int count() const noexcept { return last - first + 1; }
  /// Parses "3..6" or "5".
  static LevelRange parse(std::string_view text);
  [[nodiscard]] std::string to_string() const;
};

/// One refinement level of a polygon: mesh, space and unconstrained
/// operators, shared across different boundary labelings.
struct Discretization {
  int level = 0;
  double h = 0.0;
  std::shared_ptr<const AssembledOperators> operators;

  [[nodiscard]] FemSystem system(std::span<const SideLabel> labels) const {
    return FemSystem(operators, labels);
  }
};

/// Nested red-refined discretizations for every level in the range.
/// Throws LevelCapExceeded when the range exceeds config.max_level or the
/// environment cap.
std::vector<Discretization> build_levels(const LabeledPolygon& p, LevelRange levels, Order order,
                                         const SolverConfig& config = {},
                                         AssemblyOptions assembly = {});

struct ConvergencePoint {
  int level = 0;
  double h = 0.0;
  double eigenvalue = 0.0;
  double residual = 0.0;
  int iterations = 0;
  Index free_dofs = 0;
};

std::vector<ConvergencePoint> eigen_convergence_study(std::span<const Discretization> levels,
                                                      std::span<const SideLabel> labels,
                                                      const SolverConfig& config = {});

std::vector<ConvergencePoint> eigen_convergence_study(const LabeledPolygon& p, LevelRange levels,
                                                      Order order, const SolverConfig& config = {});

struct Extrapolation {
  double value = 0.0;
  /// Unset when the sequence is already constant.
  std::optional<double> order;
  double error_estimate = 0.0;
  /// Differences changed sign (or did not shrink): two-level estimate with
  /// the order pinned to 2.
  bool degraded = false;
};

/// Fits lambda(h) = lambda* + C h^q through the last three points; needs at
/// least three entries with consecutive h ratios of exactly 2.
/// Throws InvalidSequence otherwise.
Extrapolation richardson_extrapolate(std::span<const ConvergencePoint> sequence);

}  // namespace mixed_spectra
