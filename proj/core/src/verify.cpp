#include "mixed_spectra/verify.hpp"

#include "mixed_spectra/error.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace mixed_spectra {

namespace {

std::vector<SideLabel> dirichlet_only(std::size_t n, std::size_t side) {
  std::vector<SideLabel> labels(n, SideLabel::Neumann);
  labels.at(side) = SideLabel::Dirichlet;
  return labels;
}

std::vector<SideLabel> dirichlet_except(std::size_t n, std::size_t side) {
  std::vector<SideLabel> labels(n, SideLabel::Dirichlet);
  labels.at(side) = SideLabel::Neumann;
  return labels;
}

std::vector<SideLabel> roles_to_labels(const TriangleSpec& t, RoleSet roles) {
  std::vector<SideLabel> labels(3, SideLabel::Neumann);
  for (std::size_t s = 0; s < 3; ++s)
    if (roles.contains(t.role_of(s))) labels[s] = SideLabel::Dirichlet;
  return labels;
}

std::string describe(std::span<const SideLabel> labels) {
  std::ostringstream out;
  out << "D{";
  bool first = true;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != SideLabel::Dirichlet) continue;
    out << (first ? "" : ",") << i;
    first = false;
  }
  out << '}';
  return out.str();
}

std::vector<Point> vertices_of(const LabeledPolygon& p) {
  return {p.vertices().begin(), p.vertices().end()};
}

EigenEstimate estimate(std::span<const Discretization> levels, std::vector<SideLabel> labels,
                       std::string name, const SolverConfig& solver) {
  EigenEstimate e;
  e.label = std::move(name);
  e.levels = eigen_convergence_study(levels, labels, solver);
  e.labels = std::move(labels);
  e.extrapolation = richardson_extrapolate(e.levels);
  return e;
}

void require_levels(const VerifyConfig& config) {
  if (config.levels.count() < 3)
    throw Error(ErrorCode::ConfigError, "verification needs at least three refinement levels");
}

Hypothesis hypothesis_from(const AngleCondition& c) { return {c.holds(), c.reason()}; }

}  // namespace

const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::ConfirmedWithMargin: return "ConfirmedWithMargin";
    case Verdict::ConsistentWithinError: return "ConsistentWithinError";
    case Verdict::Violation: return "Violation";
  }
  return "?";
}

const char* to_string(CorollaryItem item) noexcept {
  switch (item) {
    case CorollaryItem::I: return "i";
    case CorollaryItem::II: return "ii";
    case CorollaryItem::III: return "iii";
  }
  return "?";
}

CorollaryItem parse_corollary_item(std::string_view text) {
  std::string t(text);
  for (auto& c : t) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (t == "i" || t == "1") return CorollaryItem::I;
  if (t == "ii" || t == "2") return CorollaryItem::II;
  if (t == "iii" || t == "3") return CorollaryItem::III;
  throw Error(ErrorCode::ParseError, "corollary item must be i, ii or iii");
}

Verdict classify(double margin, double error_budget, double eps_verdict) {
  const double band = error_budget + eps_verdict;
  if (margin > band) return Verdict::ConfirmedWithMargin;
  if (margin < -band) return Verdict::Violation;
  return Verdict::ConsistentWithinError;
}

VerificationReport compare_labelings(const std::string& check, const LabeledPolygon& geometry,
                                     const std::vector<SideLabel>& lhs_labels, std::string lhs_name,
                                     const std::vector<SideLabel>& rhs_labels, std::string rhs_name,
                                     Hypothesis hypothesis, const VerifyConfig& config) {
  require_levels(config);
  const auto levels = build_levels(geometry, config.levels, config.order, config.solver, config.assembly);

  VerificationReport r;
  r.check = check;
  r.vertices = vertices_of(geometry);
  r.hypothesis = std::move(hypothesis);
  r.lhs = estimate(levels, lhs_labels, std::move(lhs_name), config.solver);
  r.rhs = estimate(levels, rhs_labels, std::move(rhs_name), config.solver);
  r.margin = r.rhs.extrapolation.value - r.lhs.extrapolation.value;
  r.error_budget = r.lhs.extrapolation.error_estimate + r.rhs.extrapolation.error_estimate;
  r.verdict = classify(r.margin, r.error_budget, config.eps_verdict);
  return r;
}

VerificationReport verify_split(const LabeledPolygon& p, std::size_t neumann_side,
                                const VerifyConfig& config) {
  if (neumann_side >= p.size())
    throw Error(ErrorCode::InvalidSide, "side " + std::to_string(neumann_side));
  const std::size_t n = p.size();
  auto gamma = dirichlet_except(n, neumann_side);
  auto complement = dirichlet_only(n, neumann_side);
  const auto condition = angle_condition(p.with_labels(gamma), config.eps_angle);
  return compare_labelings("split", p, complement, describe(complement), gamma, describe(gamma),
                           hypothesis_from(condition), config);
}

VerificationReport verify_triangle_corollary(const TriangleSpec& t, CorollaryItem which,
                                             const VerifyConfig& config) {
  const SideRole role = which == CorollaryItem::I    ? SideRole::S
                        : which == CorollaryItem::II ? SideRole::M
                                                     : SideRole::L;
  const RoleSet single{role};
  const RoleSet rest = single.complement();
  const LabeledPolygon geometry = t.polygon(rest);

  Hypothesis h;
  const auto angles = t.enclosing_angles(role);
  const bool acute = angles[0] < std::numbers::pi / 2 - config.eps_angle &&
                     angles[1] < std::numbers::pi / 2 - config.eps_angle;
  if (which == CorollaryItem::III) {
    // The two angles at the longest side are always acute.
    h.met = true;
    if (!acute) throw Error(ErrorCode::Internal, "angle at the longest side is not acute");
  } else {
    h.met = acute;
    if (!acute) {
      std::ostringstream out;
      out << "angle at " << to_char(role) << " not below pi/2: " << angles[0] << ", " << angles[1];
      h.reason = out.str();
    }
  }
  return compare_labelings(std::string("corollary-") + to_string(which), geometry,
                           roles_to_labels(t, single), single.to_string(), roles_to_labels(t, rest),
                           rest.to_string(), std::move(h), config);
}

std::array<VerificationReport, 2> verify_right_triangle(const TriangleSpec& t,
                                                        const VerifyConfig& config) {
  require_levels(config);
  Hypothesis h;
  h.met = t.is_right(config.right_angle_tol);
  if (!h.met) h.reason = "no angle within tolerance of pi/2";

  const LabeledPolygon geometry = t.polygon(RoleSet{SideRole::L});
  const auto levels = build_levels(geometry, config.levels, config.order, config.solver, config.assembly);
  const auto hyp = estimate(levels, roles_to_labels(t, {SideRole::L}), "L", config.solver);

  auto report = [&](SideRole cathetus) {
    VerificationReport r;
    r.check = std::string("right-") + to_char(cathetus);
    r.vertices = vertices_of(geometry);
    r.hypothesis = h;
    r.lhs = estimate(levels, roles_to_labels(t, {cathetus}), std::string(1, to_char(cathetus)),
                     config.solver);
    r.rhs = hyp;
    r.margin = r.rhs.extrapolation.value - r.lhs.extrapolation.value;
    r.error_budget = r.lhs.extrapolation.error_estimate + r.rhs.extrapolation.error_estimate;
    r.verdict = classify(r.margin, r.error_budget, config.eps_verdict);
    return r;
  };
  return {report(SideRole::S), report(SideRole::M)};
}

// ---------------------------------------------------------------------------
// Proof mechanics

namespace {

VoilaReport voila_study(std::string check, const LabeledPolygon& p,
                        const std::vector<SideLabel>& gamma, const std::vector<SideLabel>& target,
                        std::size_t normal_side, Hypothesis hypothesis, const VerifyConfig& config) {
  if (config.levels.count() < 1) throw Error(ErrorCode::ConfigError, "empty level range");

  // Work in the frame where the side is parallel to the x2-axis, so the
  // derivative is taken along x1.
  const auto aligned = align_neumann_side(p, normal_side);
  const LabeledPolygon& q = aligned.polygon;

  VoilaReport report;
  report.check = std::move(check);
  report.vertices = vertices_of(p);
  report.hypothesis = std::move(hypothesis);
  report.gamma_label = describe(gamma);
  report.target_label = describe(target);
  report.chain_holds = true;

  const auto p2_levels = build_levels(q, config.levels, Order::P2, config.solver, config.assembly);
  for (const auto& d : p2_levels) {
    const FemSystem gamma_sys = d.system(gamma);
    const FemSystem target_p2 = d.system(target);
    const auto u = smallest_eigenpair(gamma_sys, config.solver);
    const auto w = smallest_eigenpair(target_p2, config.solver);

    auto p1_space = std::make_shared<const FeSpace>(d.operators->space->mesh_ptr(), Order::P1);
    const FemSystem target_p1(assemble_operators(std::move(p1_space), config.assembly), target);
    const auto v = derivative_test_function(u.eigenvector, Point(1.0, 0.0), target_p1);

    VoilaLevel lvl;
    lvl.level = d.level;
    lvl.h = d.h;
    lvl.lambda_gamma = u.eigenvalue;
    lvl.lambda_complement = w.eigenvalue;
    try {
      lvl.rayleigh = rayleigh_quotient(target_p1, v);
    } catch (const Error& e) {
      throw Error(ErrorCode::Internal, std::string("derivative test function degenerated: ") + e.what());
    }
    lvl.relative_gap = std::abs(lvl.rayleigh - lvl.lambda_gamma) / lvl.lambda_gamma;
    if (!(lvl.lambda_complement <= lvl.rayleigh * (1.0 + report.chain_tolerance)))
      report.chain_holds = false;
    report.levels.push_back(lvl);
  }

  const auto& lv = report.levels;
  report.gap_decreasing = lv.size() >= 3;
  for (std::size_t i = lv.size() >= 3 ? lv.size() - 2 : lv.size(); i < lv.size(); ++i)
    if (!(lv[i].relative_gap < lv[i - 1].relative_gap)) report.gap_decreasing = false;
  return report;
}

}  // namespace

VoilaReport verify_voila_identity(const LabeledPolygon& p, std::size_t neumann_side,
                                  const VerifyConfig& config) {
  if (neumann_side >= p.size())
    throw Error(ErrorCode::InvalidSide, "side " + std::to_string(neumann_side));
  auto gamma = dirichlet_except(p.size(), neumann_side);
  auto target = dirichlet_only(p.size(), neumann_side);
  const auto condition = angle_condition(p.with_labels(gamma), config.eps_angle);
  return voila_study("voila", p.with_labels(gamma), gamma, target, neumann_side,
                     hypothesis_from(condition), config);
}

VoilaReport verify_voila_right_triangle(const TriangleSpec& t, SideRole cathetus,
                                        const VerifyConfig& config) {
  if (cathetus == SideRole::L) throw Error(ErrorCode::InvalidSide, "L is not a cathetus");
  Hypothesis h;
  h.met = t.is_right(config.right_angle_tol);
  if (!h.met) h.reason = "no angle within tolerance of pi/2";
  const auto gamma = roles_to_labels(t, {SideRole::L});
  const auto target = roles_to_labels(t, {cathetus});
  return voila_study(std::string("voila-right-") + to_char(cathetus), t.polygon({SideRole::L}), gamma,
                     target, t.side(cathetus), std::move(h), config);
}

GrisvardReport verify_grisvard(const LabeledPolygon& p, std::optional<std::size_t> neumann_side,
                               const VerifyConfig& config) {
  std::vector<SideLabel> gamma(p.size(), SideLabel::Dirichlet);
  if (neumann_side) gamma = dirichlet_except(p.size(), *neumann_side);
  const LabeledPolygon labeled = p.with_labels(gamma);

  GrisvardReport report;
  report.check = "grisvard";
  report.vertices = vertices_of(p);
  report.gamma_label = describe(gamma);
  report.hypothesis.met = junctions_acute(labeled, config.eps_angle);
  if (!report.hypothesis.met) report.hypothesis.reason = "a junction angle is not below pi/2";

  const auto levels = build_levels(labeled, config.levels, Order::P2, config.solver, config.assembly);
  for (const auto& d : levels) {
    const auto u = smallest_eigenpair(d.system(gamma), config.solver);
    report.levels.push_back({d.level, d.h, u.eigenvalue, grisvard_residual(u.eigenvector)});
  }
  if (!report.levels.empty())
    report.reduction = report.levels.front().residual / report.levels.back().residual;
  return report;
}

std::vector<GrisvardReport> grisvard_negative_controls(LevelRange levels) {
  const LabeledPolygon square =
      make_polygon({Point(0, 0), Point(1, 0), Point(1, 1), Point(0, 1)},
                   std::vector<SideLabel>(4, SideLabel::Dirichlet));
  struct Control {
    const char* name;
    double (*f)(const Point&);
  };
  const Control controls[] = {
      {"x^2-y^2", [](const Point& x) { return x.x() * x.x() - x.y() * x.y(); }},
      {"xy", [](const Point& x) { return x.x() * x.y(); }},
  };

  std::vector<GrisvardReport> out;
  for (const auto& c : controls) {
    GrisvardReport r;
    r.check = std::string("grisvard-control-") + c.name;
    r.vertices = vertices_of(square);
    r.hypothesis = {false, "interpolant violates the boundary conditions"};
    Mesh mesh = mesh_at_level(square, levels.first);
    for (int level = levels.first; level <= levels.last; ++level) {
      if (level > levels.first) mesh = refine_uniform(mesh);
      auto space = std::make_shared<const FeSpace>(std::make_shared<const Mesh>(mesh), Order::P2);
      const auto u = interpolate(space, c.f);
      r.levels.push_back({level, mesh_size(mesh), 0.0, grisvard_residual(u)});
    }
    r.reduction = r.levels.front().residual / r.levels.back().residual;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace mixed_spectra
