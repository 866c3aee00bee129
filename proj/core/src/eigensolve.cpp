#include "mixed_spectra/eigensolve.hpp"

#include "mixed_spectra/error.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include <charconv>
#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdio>
#include <cstdlib>
#include <string>

namespace mixed_spectra {

namespace {

std::string scientific(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

Vector deterministic_start(Index n, int which) {
  if (which == 0) return Vector::Ones(n);
  Vector x(n);
  for (Index i = 0; i < n; ++i) x[i] = std::sin(1.0 + static_cast<double>(which) * 0.7391 +
                                                static_cast<double>(i) * 1.6180339887);
  return x;
}

void m_orthogonalize(Vector& x, const SparseMatrix& mass, std::span<const Vector> basis) {
  for (const auto& b : basis) x -= b.dot(mass * x) * b;
}

void fix_sign(Vector& x) {
  Index at = 0;
  x.cwiseAbs().maxCoeff(&at);
  if (x[at] < 0.0) x = -x;
}

double relative_residual(const SparseMatrix& k, const SparseMatrix& m, const Vector& x, double lambda) {
  const Vector mx = m * x;
  const double denom = std::abs(lambda) * mx.norm();
  return denom > 0.0 ? (k * x - lambda * mx).norm() / denom : INFINITY;
}

struct Pair {
  double value;
  Vector vector;
  double residual;
  int iterations;
  double tolerance;
};

double max_abs_row_sum(const SparseMatrix& a) {
  double out = 0.0;
  for (Index k = 0; k < a.outerSize(); ++k) {
    double s = 0.0;
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) s += std::abs(it.value());
    out = std::max(out, s);
  }
  return out;
}

// Rounding makes relative residuals below about eps ||K|| / (lambda ||M||)
// unreachable; on refined thin meshes that exceeds a fixed tolerance.
double attainable_tolerance(double tol, double lambda, double k_norm, double m_norm) {
  constexpr double kHeadroom = 10.0;
  const double floor = kHeadroom * std::numeric_limits<double>::epsilon() * k_norm / (std::abs(lambda) * m_norm);
  return std::max(tol, std::isfinite(floor) ? floor : tol);
}

std::vector<Pair> dense_pairs(const FemSystem& sys, int count, double tol) {
  const double k_norm = max_abs_row_sum(sys.stiffness());
  const double m_norm = max_abs_row_sum(sys.mass());
  const Eigen::MatrixXd k = Eigen::MatrixXd(sys.stiffness());
  const Eigen::MatrixXd m = Eigen::MatrixXd(sys.mass());
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(k, m);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorCode::NotConverged, "dense generalized eigensolver failed");
  std::vector<Pair> out;
  for (int j = 0; j < count && j < sys.num_free(); ++j) {
    Vector x = solver.eigenvectors().col(j);
    x /= std::sqrt(x.dot(sys.mass() * x));
    const double lambda = x.dot(sys.stiffness() * x);
    out.push_back({lambda, x, relative_residual(sys.stiffness(), sys.mass(), x, lambda), 1,
                   attainable_tolerance(tol, lambda, k_norm, m_norm)});
  }
  return out;
}

template <typename Solver>
Vector apply(const Solver& solver, const Vector& rhs) {
  return solver.solve(rhs);
}

std::vector<Pair> shift_invert_pairs(const FemSystem& sys, int count, const SolverConfig& config,
                                     const Eigen::SimplicialLLT<SparseMatrix>& k_factor) {
  const SparseMatrix& k = sys.stiffness();
  const SparseMatrix& m = sys.mass();
  const Index n = sys.num_free();
  const double k_norm = max_abs_row_sum(k);
  const double m_norm = max_abs_row_sum(m);

  std::vector<Pair> out;
  std::vector<Vector> found;
  for (int j = 0; j < count && j < n; ++j) {
    Vector x = deterministic_start(n, j);
    m_orthogonalize(x, m, found);
    x /= std::sqrt(x.dot(m * x));

    Eigen::SimplicialLDLT<SparseMatrix> shifted;
    bool use_shift = false;
    double lambda = 0.0;
    double residual = INFINITY;
    double tol = config.tol;
    int it = 0;
    while (it < config.max_iter) {
      ++it;
      const Vector mx = m * x;
      Vector y = use_shift ? apply(shifted, mx) : apply(k_factor, mx);
      m_orthogonalize(y, m, found);
      const double norm = std::sqrt(y.dot(m * y));
      if (!(norm > 0.0) || !std::isfinite(norm))
        throw Error(ErrorCode::NotConverged, "inverse iteration produced a degenerate iterate");
      x = y / norm;
      lambda = x.dot(k * x);
      residual = relative_residual(k, m, x, lambda);
      tol = attainable_tolerance(config.tol, lambda, k_norm, m_norm);
      if (residual <= tol) break;
      if (!use_shift && residual < config.acceleration_threshold) {
        SparseMatrix a = k - lambda * m;
        shifted.compute(a);
        use_shift = shifted.info() == Eigen::Success;
      }
    }
    if (!(residual <= tol))
      throw Error(ErrorCode::NotConverged,
                  "residual " + scientific(residual) + " after " + std::to_string(it) + " iterations");
    found.push_back(x);
    out.push_back({lambda, std::move(x), residual, it, tol});
  }
  return out;
}

std::vector<EigenResult> solve(const FemSystem& sys, int count, const SolverConfig& config) {
  if (sys.num_free() < 1) throw Error(ErrorCode::SingularStiffness, "system has no free dofs");
  if (!(config.tol > 0.0)) throw Error(ErrorCode::ConfigError, "solver tolerance must be positive");
  if (count < 1 || count > 5) throw Error(ErrorCode::ConfigError, "between 1 and 5 eigenpairs");
  if (sys.num_free() == sys.num_dofs())
    throw Error(ErrorCode::SingularStiffness, "no constrained dofs: the stiffness is singular");

  std::vector<Pair> pairs;
  SolverMethod used = config.method;
  if (config.method == SolverMethod::Dense) {
    pairs = dense_pairs(sys, count, config.tol);
  } else {
    Eigen::SimplicialLLT<SparseMatrix> k_factor(sys.stiffness());
    if (k_factor.info() == Eigen::Success) {
      pairs = shift_invert_pairs(sys, count, config, k_factor);
      used = SolverMethod::ShiftInvert;
    } else if (config.method == SolverMethod::Auto && sys.num_free() < config.dense_threshold) {
      pairs = dense_pairs(sys, count, config.tol);
      used = SolverMethod::Dense;
    } else {
      throw Error(ErrorCode::SingularStiffness, "stiffness factorization failed");
    }
  }

  std::vector<EigenResult> out;
  for (auto& p : pairs) {
    if (!(p.value > 0.0))
      throw Error(ErrorCode::SingularStiffness, "nonpositive eigenvalue " + std::to_string(p.value));
    if (!(p.residual <= p.tolerance))
      throw Error(ErrorCode::NotConverged, "residual " + scientific(p.residual));
    fix_sign(p.vector);
    out.push_back({p.value, sys.expand(p.vector), p.residual, p.tolerance, p.iterations,
                   sys.space().mesh().level, used});
  }
  return out;
}

}  // namespace

const char* to_string(SolverMethod method) noexcept {
  switch (method) {
    case SolverMethod::Auto: return "auto";
    case SolverMethod::ShiftInvert: return "shift-invert";
    case SolverMethod::Dense: return "dense";
  }
  return "?";
}

int effective_level_cap(int configured) {
  if (const char* env = std::getenv("MIXED_SPECTRA_MAX_LEVEL")) {
    int value = 0;
    const std::string_view text(env);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || value < 0)
      throw Error(ErrorCode::ConfigError, "MIXED_SPECTRA_MAX_LEVEL must be a nonnegative integer");
    return value;
  }
  return configured;
}

EigenResult smallest_eigenpair(const FemSystem& sys, const SolverConfig& config) {
  return std::move(solve(sys, 1, config).front());
}

std::vector<EigenResult> smallest_eigenpairs(const FemSystem& sys, int count,
                                             const SolverConfig& config) {
  return solve(sys, count, config);
}

// ---------------------------------------------------------------------------
// Levels

LevelRange LevelRange::parse(std::string_view text) {
  auto to_int = [&](std::string_view s) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
      throw Error(ErrorCode::ParseError, "bad level range '" + std::string(text) + "'");
    return v;
  };
  LevelRange r;
  if (const auto dots = text.find(".."); dots != std::string_view::npos) {
    r.first = to_int(text.substr(0, dots));
    r.last = to_int(text.substr(dots + 2));
  } else {
    r.first = r.last = to_int(text);
  }
  if (r.first < 0 || r.last < r.first)
    throw Error(ErrorCode::ParseError, "bad level range '" + std::string(text) + "'");
  return r;
}

std::string LevelRange::to_string() const {
  return first == last ? std::to_string(first) : std::to_string(first) + ".." + std::to_string(last);
}

std::vector<Discretization> build_levels(const LabeledPolygon& p, LevelRange levels, Order order,
                                         const SolverConfig& config, AssemblyOptions assembly) {
  if (levels.first < 0 || levels.last < levels.first)
    throw Error(ErrorCode::ConfigError, "empty level range");
  const int cap = effective_level_cap(config.max_level);
  if (levels.last > cap)
    throw Error(ErrorCode::LevelCapExceeded,
                "level " + std::to_string(levels.last) + " exceeds the cap " + std::to_string(cap));

  std::vector<Discretization> out;
  Mesh mesh = base_mesh(p);
  for (int k = 0; k < levels.first; ++k) mesh = refine_uniform(mesh);
  for (int level = levels.first; level <= levels.last; ++level) {
    if (level > levels.first) mesh = refine_uniform(mesh);
    auto shared = std::make_shared<const Mesh>(mesh);
    auto space = std::make_shared<const FeSpace>(shared, order);
    out.push_back({level, mesh_size(mesh), assemble_operators(std::move(space), assembly)});
  }
  return out;
}

std::vector<ConvergencePoint> eigen_convergence_study(std::span<const Discretization> levels,
                                                      std::span<const SideLabel> labels,
                                                      const SolverConfig& config) {
  std::vector<ConvergencePoint> out;
  for (const auto& d : levels) {
    const FemSystem sys = d.system(labels);
    const auto r = smallest_eigenpair(sys, config);
    out.push_back({d.level, d.h, r.eigenvalue, r.residual, r.iterations, sys.num_free()});
  }
  return out;
}

std::vector<ConvergencePoint> eigen_convergence_study(const LabeledPolygon& p, LevelRange levels,
                                                      Order order, const SolverConfig& config) {
  const auto disc = build_levels(p, levels, order, config);
  return eigen_convergence_study(disc, p.labels(), config);
}

// ---------------------------------------------------------------------------
// Extrapolation

Extrapolation richardson_extrapolate(std::span<const ConvergencePoint> seq) {
  if (seq.size() < 3) throw Error(ErrorCode::InvalidSequence, "need at least three levels");
  for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
    const double ratio = seq[i].h / seq[i + 1].h;
    if (!(std::abs(ratio - 2.0) <= 1e-9))
      throw Error(ErrorCode::InvalidSequence, "mesh sizes must halve between levels");
  }
  const std::size_t n = seq.size();
  const double l1 = seq[n - 3].eigenvalue;
  const double l2 = seq[n - 2].eigenvalue;
  const double l3 = seq[n - 1].eigenvalue;
  const double d1 = l1 - l2;
  const double d2 = l2 - l3;

  Extrapolation out;
  if (d1 == 0.0 && d2 == 0.0) {
    out.value = l3;
    out.degraded = true;
    return out;
  }
  const double ratio = d2 != 0.0 ? d1 / d2 : 0.0;
  if (ratio > 1.0 && std::isfinite(ratio)) {
    const double q = std::log2(ratio);
    out.order = q;
    out.value = l3 - d2 / (ratio - 1.0);
  } else {
    out.order = 2.0;
    out.degraded = true;
    out.value = l3 - d2 / 3.0;
  }
  out.error_estimate = std::abs(l3 - out.value);
  return out;
}

}  // namespace mixed_spectra
