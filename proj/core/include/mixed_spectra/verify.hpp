#pragma once

#include "mixed_spectra/eigensolve.hpp"
#include "mixed_spectra/geometry.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace mixed_spectra {

/// Outcome of comparing lhs <= rhs under an error budget.
enum class Verdict { ConfirmedWithMargin, ConsistentWithinError, Violation };

const char* to_string(Verdict v) noexcept;

struct VerifyConfig {
  LevelRange levels{3, 6};
  Order order = Order::P2;
  SolverConfig solver;
  double eps_verdict = 1e-8;
  double eps_angle = kDefaultAngleEpsilon;
  /// How close to pi/2 an angle must be for a triangle to count as right.
  double right_angle_tol = 1e-9;
  AssemblyOptions assembly;
};

struct Hypothesis {
  bool met = false;
  std::string reason;  // empty when met
};

/// Per-level eigenvalues of one boundary labeling and their extrapolation.
struct EigenEstimate {
  std::string label;
  std::vector<SideLabel> labels;
  std::vector<ConvergencePoint> levels;
  Extrapolation extrapolation;
};

/// Evidence for lhs <= rhs, where lhs and rhs are lowest eigenvalues of
/// two labelings of the same polygon. The error budget is the sum of the
/// Richardson error estimates; it is an estimate, not a rigorous bound.
struct VerificationReport {
  std::string check;
  std::vector<Point> vertices;
  Hypothesis hypothesis;
  EigenEstimate lhs;
  EigenEstimate rhs;
  double margin = 0.0;
  double error_budget = 0.0;
  Verdict verdict = Verdict::ConsistentWithinError;

  /// A Violation of an inequality whose hypothesis holds: a solver bug or
  /// a counterexample, never expected.
  [[nodiscard]] bool is_counterexample() const noexcept {
    return hypothesis.met && verdict == Verdict::Violation;
  }
};

Verdict classify(double margin, double error_budget, double eps_verdict);

/// Compares lambda_1 for Dirichlet on `lhs_dirichlet` against Dirichlet on
/// `rhs_dirichlet` on one shared mesh hierarchy.
VerificationReport compare_labelings(const std::string& check, const LabeledPolygon& geometry,
                                     const std::vector<SideLabel>& lhs_labels, std::string lhs_name,
                                     const std::vector<SideLabel>& rhs_labels, std::string rhs_name,
                                     Hypothesis hypothesis, const VerifyConfig& config);

/// lambda_1 with Dirichlet on the single side `neumann_side` versus
/// Dirichlet on all the other sides. The input labels are ignored.
VerificationReport verify_split(const LabeledPolygon& p, std::size_t neumann_side,
                                const VerifyConfig& config = {});

enum class CorollaryItem { I, II, III };

const char* to_string(CorollaryItem item) noexcept;
CorollaryItem parse_corollary_item(std::string_view text);

/// (i) lambda^S <= lambda^{L+M} when both angles at S are acute,
/// (ii) lambda^M <= lambda^{L+S} when both angles at M are acute,
/// (iii) lambda^L <= lambda^{M+S} for every triangle.
VerificationReport verify_triangle_corollary(const TriangleSpec& t, CorollaryItem which,
                                             const VerifyConfig& config = {});

/// lambda^S <= lambda^L and lambda^M <= lambda^L for a right triangle,
/// Dirichlet on one side and Neumann on the other two each time.
std::array<VerificationReport, 2> verify_right_triangle(const TriangleSpec& t,
                                                        const VerifyConfig& config = {});

struct VoilaLevel {
  int level = 0;
  double h = 0.0;
  double lambda_gamma = 0.0;       // ground state the derivative is taken of
  double lambda_complement = 0.0;  // lowest eigenvalue of the target problem
  double rayleigh = 0.0;           // Rayleigh quotient of the test function
  double relative_gap = 0.0;       // |rayleigh - lambda_gamma| / lambda_gamma
};

/// Convergence trend of the derivative test function's Rayleigh quotient.
struct VoilaReport {
  std::string check;
  std::vector<Point> vertices;
  Hypothesis hypothesis;
  std::string gamma_label;
  std::string target_label;
  std::vector<VoilaLevel> levels;
  /// lambda_complement <= rayleigh (1 + chain_tolerance) at every level.
  bool chain_holds = false;
  double chain_tolerance = 1e-9;
  /// |R - lambda_gamma| shrinks over the last three levels.
  bool gap_decreasing = false;
};

/// Ground state u for Dirichlet on every side except `neumann_side`, then
/// v = projected d u / d n with n normal to that side, zeroed on it, and
/// R = Rayleigh quotient of v for Dirichlet on that side alone. Runs in P2
/// regardless of config.order.
VoilaReport verify_voila_identity(const LabeledPolygon& p, std::size_t neumann_side,
                                  const VerifyConfig& config = {});

/// The right-triangle variant: u for Dirichlet on L, v zeroed on the
/// cathetus `cathetus`, R its Rayleigh quotient for Dirichlet on that cathetus.
VoilaReport verify_voila_right_triangle(const TriangleSpec& t, SideRole cathetus,
                                        const VerifyConfig& config = {});

struct GrisvardLevel {
  int level = 0;
  double h = 0.0;
  double eigenvalue = 0.0;
  double residual = 0.0;
};

struct GrisvardReport {
  std::string check;
  std::vector<Point> vertices;
  Hypothesis hypothesis;
  std::string gamma_label;
  std::vector<GrisvardLevel> levels;
  /// residual at the first level over residual at the last.
  double reduction = 0.0;
};

/// Second-derivative identity residual of the P2 ground state for
/// Dirichlet on every side except `neumann_side` (all sides when unset).
/// The hypothesis is acute junction angles (vacuous without junctions).
GrisvardReport verify_grisvard(const LabeledPolygon& p, std::optional<std::size_t> neumann_side,
                               const VerifyConfig& config = {});

/// Residuals of the interpolants of x^2 - y^2 and xy on the unit square,
/// functions that do not satisfy the identity's boundary hypotheses.
std::vector<GrisvardReport> grisvard_negative_controls(LevelRange levels);

}  // namespace mixed_spectra
