#include "mixed_spectra/fem.hpp"

#include "mixed_spectra/error.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <array>
#include <cmath>
#include <thread>
#include <unordered_map>

namespace mixed_spectra {

namespace {

using Bary = std::array<double, 3>;

struct QuadraturePoint {
  Bary at;
  double weight;  // fraction of the element area
};

// Edge midpoints, exact for degree 2.
constexpr std::array<QuadraturePoint, 3> kDegree2{{
    {{0.5, 0.5, 0.0}, 1.0 / 3.0},
    {{0.0, 0.5, 0.5}, 1.0 / 3.0},
    {{0.5, 0.0, 0.5}, 1.0 / 3.0},
}};

// Six-point symmetric rule, exact for degree 4.
constexpr double kA1 = 0.44594849091596488631832925388305;
constexpr double kW1 = 0.22338158967801146569500700843312;
constexpr double kA2 = 0.091576213509770743459571463402202;
constexpr double kW2 = 0.10995174365532186763832632490021;
constexpr std::array<QuadraturePoint, 6> kDegree4{{
    {{1.0 - 2.0 * kA1, kA1, kA1}, kW1},
    {{kA1, 1.0 - 2.0 * kA1, kA1}, kW1},
    {{kA1, kA1, 1.0 - 2.0 * kA1}, kW1},
    {{1.0 - 2.0 * kA2, kA2, kA2}, kW2},
    {{kA2, 1.0 - 2.0 * kA2, kA2}, kW2},
    {{kA2, kA2, 1.0 - 2.0 * kA2}, kW2},
}};

// Local edge k of a P2 element joins vertices k and kEdgeEnd[k].
constexpr std::array<int, 3> kEdgeEnd{1, 2, 0};

struct ElementGeometry {
  double area;
  std::array<Point, 3> grad_bary;
};

ElementGeometry element_geometry(const Mesh& m, Index e) {
  const auto& t = m.elements[e];
  const Point& p0 = m.nodes[t[0]];
  const Point u = m.nodes[t[1]] - p0;
  const Point v = m.nodes[t[2]] - p0;
  const double det = u.x() * v.y() - u.y() * v.x();
  ElementGeometry g;
  g.area = 0.5 * det;
  g.grad_bary[1] = Point(v.y(), -v.x()) / det;
  g.grad_bary[2] = Point(-u.y(), u.x()) / det;
  g.grad_bary[0] = -g.grad_bary[1] - g.grad_bary[2];
  return g;
}

template <int N>
using LocalVector = Eigen::Matrix<double, N, 1>;
template <int N>
using LocalMatrix = Eigen::Matrix<double, N, N>;

void p1_values(const Bary& l, LocalVector<3>& phi) { phi << l[0], l[1], l[2]; }

void p2_values(const Bary& l, LocalVector<6>& phi) {
  for (int k = 0; k < 3; ++k) phi[k] = l[k] * (2.0 * l[k] - 1.0);
  for (int k = 0; k < 3; ++k) phi[3 + k] = 4.0 * l[k] * l[kEdgeEnd[k]];
}

void p2_gradients(const Bary& l, const ElementGeometry& g, std::array<Point, 6>& grad) {
  for (int k = 0; k < 3; ++k) grad[k] = (4.0 * l[k] - 1.0) * g.grad_bary[k];
  for (int k = 0; k < 3; ++k) {
    const int j = kEdgeEnd[k];
    grad[3 + k] = 4.0 * (l[j] * g.grad_bary[k] + l[k] * g.grad_bary[j]);
  }
}

std::array<Eigen::Matrix2d, 6> p2_hessians(const ElementGeometry& g) {
  std::array<Eigen::Matrix2d, 6> h;
  for (int k = 0; k < 3; ++k) h[k] = 4.0 * g.grad_bary[k] * g.grad_bary[k].transpose();
  for (int k = 0; k < 3; ++k) {
    const Point& a = g.grad_bary[k];
    const Point& b = g.grad_bary[kEdgeEnd[k]];
    h[3 + k] = 4.0 * (a * b.transpose() + b * a.transpose());
  }
  return h;
}

struct P1Element {
  LocalMatrix<3> stiffness;
  LocalMatrix<3> mass;
};

P1Element p1_element(const ElementGeometry& g) {
  P1Element out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out.stiffness(i, j) = g.area * g.grad_bary[i].dot(g.grad_bary[j]);
  out.mass.setZero();
  LocalVector<3> phi;
  for (const auto& q : kDegree2) {
    p1_values(q.at, phi);
    out.mass.noalias() += (q.weight * g.area) * phi * phi.transpose();
  }
  return out;
}

struct P2Element {
  LocalMatrix<6> stiffness;
  LocalMatrix<6> mass;
};

P2Element p2_element(const ElementGeometry& g) {
  P2Element out;
  out.stiffness.setZero();
  out.mass.setZero();
  LocalVector<6> phi;
  std::array<Point, 6> grad;
  for (const auto& q : kDegree4) {
    const double w = q.weight * g.area;
    p2_values(q.at, phi);
    p2_gradients(q.at, g, grad);
    out.mass.noalias() += w * phi * phi.transpose();
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) out.stiffness(i, j) += w * grad[i].dot(grad[j]);
  }
  return out;
}

// Packs both element matrices row-major: stiffness then mass.
std::vector<double> element_matrices(const FeSpace& space, Index first, Index last) {
  const int nd = space.dofs_per_element();
  const std::size_t block = static_cast<std::size_t>(2 * nd * nd);
  std::vector<double> out(block * static_cast<std::size_t>(last - first));
  for (Index e = first; e < last; ++e) {
    double* dst = out.data() + block * static_cast<std::size_t>(e - first);
    const auto g = element_geometry(space.mesh(), e);
    if (space.order() == Order::P1) {
      const auto em = p1_element(g);
      using Block = Eigen::Map<Eigen::Matrix<double, 3, 3, Eigen::RowMajor>>;
      Block{dst} = em.stiffness;
      Block{dst + 9} = em.mass;
    } else {
      const auto em = p2_element(g);
      using Block = Eigen::Map<Eigen::Matrix<double, 6, 6, Eigen::RowMajor>>;
      Block{dst} = em.stiffness;
      Block{dst + 36} = em.mass;
    }
  }
  return out;
}

bool same_mesh(const FeSpace& a, const FeSpace& b) {
  if (a.mesh_ptr() == b.mesh_ptr()) return true;
  const Mesh& ma = a.mesh();
  const Mesh& mb = b.mesh();
  return ma.nodes == mb.nodes && ma.elements == mb.elements;
}

}  // namespace

const char* to_string(Order order) noexcept { return order == Order::P1 ? "P1" : "P2"; }

Order parse_order(std::string_view text) {
  if (text == "P1" || text == "p1" || text == "1") return Order::P1;
  if (text == "P2" || text == "p2" || text == "2") return Order::P2;
  throw Error(ErrorCode::ParseError, "order must be P1 or P2, got '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------
// FeSpace

FeSpace::FeSpace(std::shared_ptr<const Mesh> mesh, Order order)
    : mesh_(std::move(mesh)), order_(order) {
  const Mesh& m = *mesh_;
  const Index nv = m.num_nodes();
  dof_points_ = m.nodes;

  std::size_t num_sides = m.source_vertices.size();
  for (const auto& be : m.boundary_edges) num_sides = std::max(num_sides, be.side + 1);
  side_dofs_.resize(num_sides);

  if (order_ == Order::P1) {
    element_dofs_.reserve(3 * m.elements.size());
    for (const auto& t : m.elements) element_dofs_.insert(element_dofs_.end(), t.begin(), t.end());
    for (const auto& be : m.boundary_edges) {
      side_dofs_[be.side].push_back(be.nodes[0]);
      side_dofs_[be.side].push_back(be.nodes[1]);
    }
  } else {
    const MeshEdges edges = m.edges();
    dof_points_.reserve(nv + edges.nodes.size());
    std::unordered_map<std::uint64_t, Index> edge_index;
    edge_index.reserve(edges.nodes.size());
    for (std::size_t k = 0; k < edges.nodes.size(); ++k) {
      const auto [a, b] = edges.nodes[k];
      dof_points_.emplace_back(0.5 * (m.nodes[a] + m.nodes[b]));
      edge_index.emplace((static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b),
                         static_cast<Index>(k));
    }
    element_dofs_.reserve(6 * m.elements.size());
    for (std::size_t e = 0; e < m.elements.size(); ++e) {
      const auto& t = m.elements[e];
      element_dofs_.insert(element_dofs_.end(), t.begin(), t.end());
      for (int k = 0; k < 3; ++k) element_dofs_.push_back(nv + edges.of_element[e][k]);
    }
    for (const auto& be : m.boundary_edges) {
      const Index a = std::min(be.nodes[0], be.nodes[1]);
      const Index b = std::max(be.nodes[0], be.nodes[1]);
      auto& dofs = side_dofs_[be.side];
      dofs.push_back(be.nodes[0]);
      dofs.push_back(be.nodes[1]);
      dofs.push_back(nv + edge_index.at((static_cast<std::uint64_t>(a) << 32) |
                                        static_cast<std::uint64_t>(b)));
    }
  }
  for (auto& dofs : side_dofs_) {
    std::sort(dofs.begin(), dofs.end());
    dofs.erase(std::unique(dofs.begin(), dofs.end()), dofs.end());
  }
}

std::vector<bool> FeSpace::dirichlet_mask(std::span<const SideLabel> labels) const {
  if (labels.size() != side_dofs_.size())
    throw Error(ErrorCode::InconsistentMesh, "label count does not match the mesh's sides");
  std::vector<bool> mask(static_cast<std::size_t>(num_dofs()), false);
  for (std::size_t s = 0; s < labels.size(); ++s) {
    if (labels[s] != SideLabel::Dirichlet) continue;
    for (Index d : side_dofs_[s]) mask[static_cast<std::size_t>(d)] = true;
  }
  return mask;
}

// ---------------------------------------------------------------------------
// Assembly

std::shared_ptr<const AssembledOperators> assemble_operators(std::shared_ptr<const FeSpace> space,
                                                             AssemblyOptions options) {
  const FeSpace& fs = *space;
  const Index ne = fs.mesh().num_elements();
  const int nd = fs.dofs_per_element();
  const std::size_t block = static_cast<std::size_t>(2 * nd * nd);

  std::vector<double> local;
  const unsigned threads = std::max(1U, std::min<unsigned>(options.threads, static_cast<unsigned>(ne)));
  if (threads == 1) {
    local = element_matrices(fs, 0, ne);
  } else {
    local.resize(block * static_cast<std::size_t>(ne));
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      const Index first = ne * t / threads;
      const Index last = ne * (t + 1) / threads;
      pool.emplace_back([&, first, last] {
        const auto part = element_matrices(fs, first, last);
        std::copy(part.begin(), part.end(), local.begin() + static_cast<std::ptrdiff_t>(block * first));
      });
    }
    for (auto& th : pool) th.join();
  }

  std::vector<Eigen::Triplet<double>> k_triplets;
  std::vector<Eigen::Triplet<double>> m_triplets;
  k_triplets.reserve(static_cast<std::size_t>(ne) * nd * nd);
  m_triplets.reserve(static_cast<std::size_t>(ne) * nd * nd);
  for (Index e = 0; e < ne; ++e) {
    const auto dofs = fs.element_dofs(e);
    const double* k = local.data() + block * static_cast<std::size_t>(e);
    const double* m = k + nd * nd;
    for (int i = 0; i < nd; ++i)
      for (int j = 0; j < nd; ++j) {
        k_triplets.emplace_back(dofs[i], dofs[j], k[i * nd + j]);
        m_triplets.emplace_back(dofs[i], dofs[j], m[i * nd + j]);
      }
  }

  auto ops = std::make_shared<AssembledOperators>();
  ops->space = std::move(space);
  const Index n = fs.num_dofs();
  ops->stiffness.resize(n, n);
  ops->mass.resize(n, n);
  ops->stiffness.setFromTriplets(k_triplets.begin(), k_triplets.end());
  ops->mass.setFromTriplets(m_triplets.begin(), m_triplets.end());
  return ops;
}

namespace {

SparseMatrix restrict_matrix(const SparseMatrix& full, std::span<const Index> dof_map, Index n_free) {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(full.nonZeros()));
  for (Index col = 0; col < full.outerSize(); ++col) {
    const Index fc = dof_map[col];
    if (fc == kConstrained) continue;
    for (SparseMatrix::InnerIterator it(full, col); it; ++it) {
      const Index fr = dof_map[it.row()];
      if (fr != kConstrained) triplets.emplace_back(fr, fc, it.value());
    }
  }
  SparseMatrix out(n_free, n_free);
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

}  // namespace

FemSystem::FemSystem(std::shared_ptr<const AssembledOperators> operators,
                     std::span<const SideLabel> labels)
    : ops_(std::move(operators)), labels_(labels.begin(), labels.end()) {
  const auto mask = ops_->space->dirichlet_mask(labels_);
  dof_map_.assign(mask.size(), kConstrained);
  for (std::size_t d = 0; d < mask.size(); ++d) {
    if (mask[d]) continue;
    dof_map_[d] = static_cast<Index>(free_dofs_.size());
    free_dofs_.push_back(static_cast<Index>(d));
  }
  stiffness_ = restrict_matrix(ops_->stiffness, dof_map_, num_free());
  mass_ = restrict_matrix(ops_->mass, dof_map_, num_free());
}

DiscreteFunction FemSystem::expand(const Vector& free_values) const {
  if (free_values.size() != num_free())
    throw Error(ErrorCode::InconsistentMesh, "free vector has the wrong length");
  Vector full = Vector::Zero(num_dofs());
  for (Index i = 0; i < num_free(); ++i) full[free_dofs_[i]] = free_values[i];
  return DiscreteFunction(space_ptr(), std::move(full));
}

Vector FemSystem::restrict_to_free(const DiscreteFunction& f) const {
  if (f.order() != order() || !same_mesh(f.space(), space()))
    throw Error(ErrorCode::InconsistentMesh, "function does not live on this system's space");
  Vector out(num_free());
  for (Index i = 0; i < num_free(); ++i) out[i] = f.coefficients()[free_dofs_[i]];
  return out;
}

FemSystem assemble(const Mesh& m, const LabeledPolygon& p, Order order, AssemblyOptions options) {
  if (!m.references(p))
    throw Error(ErrorCode::InconsistentMesh, "mesh was not generated from this polygon");
  auto space = std::make_shared<const FeSpace>(std::make_shared<const Mesh>(m), order);
  return FemSystem(assemble_operators(std::move(space), options), p.labels());
}

// ---------------------------------------------------------------------------
// Functions

DiscreteFunction::DiscreteFunction(std::shared_ptr<const FeSpace> space, Vector coefficients)
    : space_(std::move(space)), coefficients_(std::move(coefficients)) {
  if (coefficients_.size() != space_->num_dofs())
    throw Error(ErrorCode::InconsistentMesh, "coefficient vector has the wrong length");
}

DiscreteFunction interpolate(std::shared_ptr<const FeSpace> space,
                             const std::function<double(const Point&)>& f) {
  Vector c(space->num_dofs());
  for (Index d = 0; d < space->num_dofs(); ++d) c[d] = f(space->dof_point(d));
  return DiscreteFunction(std::move(space), std::move(c));
}

double rayleigh_quotient(const FemSystem& sys, const DiscreteFunction& f) {
  const Vector x = sys.restrict_to_free(f);
  const double scale = x.size() > 0 ? x.cwiseAbs().maxCoeff() : 0.0;
  const double mass_sq = x.dot(sys.mass() * x);
  double area = 0.0;
  for (Index e = 0; e < sys.space().mesh().num_elements(); ++e) area += sys.space().mesh().element_area(e);
  if (!(scale > 0.0) || !(std::sqrt(std::max(mass_sq, 0.0)) > 1e-14 * scale * std::sqrt(area)))
    throw Error(ErrorCode::ZeroFunction, "function has vanishing M-norm on the free dofs");
  return x.dot(sys.stiffness() * x) / mass_sq;
}

DiscreteFunction derivative_test_function(const DiscreteFunction& u, const Point& direction,
                                          const FemSystem& target) {
  if (u.order() != Order::P2)
    throw Error(ErrorCode::OrderMismatch, "derivative test function needs a P2 input");
  if (target.order() != Order::P1 || !same_mesh(u.space(), target.space()))
    throw Error(ErrorCode::InconsistentMesh, "target must be a P1 system on the same mesh");

  const Mesh& m = u.space().mesh();
  const Vector& c = u.coefficients();
  const Point d = direction.normalized();

  Vector rhs = Vector::Zero(m.num_nodes());
  double grad_scale = 0.0;
  std::array<Point, 6> grad;
  for (Index e = 0; e < m.num_elements(); ++e) {
    const auto g = element_geometry(m, e);
    for (const auto& gb : g.grad_bary) grad_scale = std::max(grad_scale, gb.norm());
    const auto dofs = u.space().element_dofs(e);
    // grad(u).d is linear on the element; take its vertex values.
    LocalVector<3> vertex_values;
    for (int k = 0; k < 3; ++k) {
      Bary l{0.0, 0.0, 0.0};
      l[k] = 1.0;
      p2_gradients(l, g, grad);
      double s = 0.0;
      for (int i = 0; i < 6; ++i) s += c[dofs[i]] * grad[i].dot(d);
      vertex_values[k] = s;
    }
    const LocalVector<3> local = p1_element(g).mass * vertex_values;
    const auto& t = m.elements[e];
    for (int k = 0; k < 3; ++k) rhs[t[k]] += local[k];
  }

  Eigen::SimplicialLDLT<SparseMatrix> mass_solver(target.full_mass());
  if (mass_solver.info() != Eigen::Success)
    throw Error(ErrorCode::Internal, "P1 mass matrix factorization failed");
  Vector v = mass_solver.solve(rhs);

  // Rounding noise (e.g. from a constant u) must not survive as a nonzero function.
  const double noise = 1e-12 * grad_scale * (c.size() > 0 ? c.cwiseAbs().maxCoeff() : 0.0);
  const auto dof_map = target.dof_map();
  for (Index i = 0; i < v.size(); ++i)
    if (dof_map[i] == kConstrained || std::abs(v[i]) <= noise) v[i] = 0.0;
  return DiscreteFunction(target.space_ptr(), std::move(v));
}

GrisvardTerms grisvard_terms(const DiscreteFunction& u) {
  if (u.order() != Order::P2)
    throw Error(ErrorCode::OrderMismatch, "second derivatives need a P2 function");
  const Mesh& m = u.space().mesh();
  const Vector& c = u.coefficients();
  GrisvardTerms out;
  std::array<Point, 6> grad;
  for (Index e = 0; e < m.num_elements(); ++e) {
    const auto g = element_geometry(m, e);
    const auto dofs = u.space().element_dofs(e);
    const auto h = p2_hessians(g);
    Eigen::Matrix2d hess = Eigen::Matrix2d::Zero();
    for (int i = 0; i < 6; ++i) hess += c[dofs[i]] * h[i];
    out.mixed_squared += g.area * hess(0, 1) * hess(0, 1);
    out.product += g.area * hess(0, 0) * hess(1, 1);
    for (const auto& q : kDegree4) {
      p2_gradients(q.at, g, grad);
      Point gu = Point::Zero();
      for (int i = 0; i < 6; ++i) gu += c[dofs[i]] * grad[i];
      out.h1_seminorm_squared += q.weight * g.area * gu.squaredNorm();
    }
  }
  return out;
}

double grisvard_residual(const DiscreteFunction& u) {
  const auto t = grisvard_terms(u);
  return std::abs(t.mixed_squared - t.product) / (t.h1_seminorm_squared + 1e-300);
}

double l2_error(const DiscreteFunction& u, const std::function<double(const Point&)>& exact) {
  const FeSpace& fs = u.space();
  const Mesh& m = fs.mesh();
  const Vector& c = u.coefficients();
  double sum = 0.0;
  for (Index e = 0; e < m.num_elements(); ++e) {
    const auto g = element_geometry(m, e);
    const auto dofs = fs.element_dofs(e);
    const auto& t = m.elements[e];
    for (const auto& q : kDegree4) {
      const Point x = q.at[0] * m.nodes[t[0]] + q.at[1] * m.nodes[t[1]] + q.at[2] * m.nodes[t[2]];
      double value = 0.0;
      if (fs.order() == Order::P1) {
        for (int i = 0; i < 3; ++i) value += c[dofs[i]] * q.at[i];
      } else {
        LocalVector<6> phi;
        p2_values(q.at, phi);
        for (int i = 0; i < 6; ++i) value += c[dofs[i]] * phi[i];
      }
      const double diff = value - exact(x);
      sum += q.weight * g.area * diff * diff;
    }
  }
  return std::sqrt(sum);
}

DiscreteFunction prolong_to_p2(const DiscreteFunction& u, std::shared_ptr<const FeSpace> p2_space) {
  if (u.order() != Order::P1 || p2_space->order() != Order::P2 || !same_mesh(u.space(), *p2_space))
    throw Error(ErrorCode::OrderMismatch, "prolongation maps P1 to P2 on one mesh");
  const Mesh& m = p2_space->mesh();
  Vector c(p2_space->num_dofs());
  c.head(m.num_nodes()) = u.coefficients();
  for (Index e = 0; e < m.num_elements(); ++e) {
    const auto dofs = p2_space->element_dofs(e);
    for (int k = 0; k < 3; ++k)
      c[dofs[3 + k]] = 0.5 * (u.coefficients()[dofs[k]] + u.coefficients()[dofs[kEdgeEnd[k]]]);
  }
  return DiscreteFunction(std::move(p2_space), std::move(c));
}

}  // namespace mixed_spectra
