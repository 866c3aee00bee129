#pragma once

#include "mixed_spectra/geometry.hpp"
#include "mixed_spectra/mesh.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <functional>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

namespace mixed_spectra {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;

enum class Order { P1 = 1, P2 = 2 };

const char* to_string(Order order) noexcept;
Order parse_order(std::string_view text);

/// Continuous Lagrange space of the given order on a mesh.
///
/// Degrees of freedom: mesh nodes first (same numbering), then one per
/// mesh edge for P2. Local P2 dofs are the three vertices followed by the
/// midpoints of edges (0,1), (1,2), (2,0).
class FeSpace {
 public:
  FeSpace(std::shared_ptr<const Mesh> mesh, Order order);

  [[nodiscard]] const Mesh& mesh() const noexcept { return *mesh_; }
  [[nodiscard]] const std::shared_ptr<const Mesh>& mesh_ptr() const noexcept { return mesh_; }
  [[nodiscard]] Order order() const noexcept { return order_; }
  [[nodiscard]] Index num_dofs() const noexcept { return static_cast<Index>(dof_points_.size()); }
  [[nodiscard]] int dofs_per_element() const noexcept { return order_ == Order::P1 ? 3 : 6; }
  [[nodiscard]] std::span<const Index> element_dofs(Index e) const {
    return {element_dofs_.data() + e * dofs_per_element(),
            static_cast<std::size_t>(dofs_per_element())};
  }
  [[nodiscard]] const Point& dof_point(Index d) const { return dof_points_[d]; }
  /// Dofs on the closed polygon side (endpoints included).
  [[nodiscard]] std::span<const Index> side_dofs(std::size_t side) const { return side_dofs_.at(side); }
  [[nodiscard]] std::size_t num_sides() const noexcept { return side_dofs_.size(); }

  /// Mask of dofs on the closure of the Dirichlet sides.
  [[nodiscard]] std::vector<bool> dirichlet_mask(std::span<const SideLabel> labels) const;

 private:
  std::shared_ptr<const Mesh> mesh_;
  Order order_;
  std::vector<Index> element_dofs_;
  std::vector<Point> dof_points_;
  std::vector<std::vector<Index>> side_dofs_;
};

/// Unconstrained stiffness and mass matrices of a space.
struct AssembledOperators {
  std::shared_ptr<const FeSpace> space;
  SparseMatrix stiffness;
  SparseMatrix mass;
};

struct AssemblyOptions {
  /// Element matrices may be computed on several threads; the global
  /// accumulation order is fixed, so results do not depend on this value.
  unsigned threads = 1;
};

std::shared_ptr<const AssembledOperators> assemble_operators(std::shared_ptr<const FeSpace> space,
                                                             AssemblyOptions options = {});

inline constexpr Index kConstrained = -1;

class DiscreteFunction;

/// Stiffness/mass pair restricted to the dofs that do not lie on the closed
/// Dirichlet part of the boundary (symmetric elimination).
class FemSystem {
 public:
  FemSystem(std::shared_ptr<const AssembledOperators> operators, std::span<const SideLabel> labels);

  [[nodiscard]] const SparseMatrix& stiffness() const noexcept { return stiffness_; }
  [[nodiscard]] const SparseMatrix& mass() const noexcept { return mass_; }
  [[nodiscard]] const SparseMatrix& full_stiffness() const noexcept { return ops_->stiffness; }
  [[nodiscard]] const SparseMatrix& full_mass() const noexcept { return ops_->mass; }
  [[nodiscard]] const FeSpace& space() const noexcept { return *ops_->space; }
  [[nodiscard]] const std::shared_ptr<const FeSpace>& space_ptr() const noexcept { return ops_->space; }
  [[nodiscard]] const std::shared_ptr<const AssembledOperators>& operators() const noexcept { return ops_; }
  [[nodiscard]] Order order() const noexcept { return space().order(); }
  [[nodiscard]] std::span<const SideLabel> labels() const noexcept { return labels_; }

  [[nodiscard]] Index num_dofs() const noexcept { return static_cast<Index>(dof_map_.size()); }
  [[nodiscard]] Index num_free() const noexcept { return static_cast<Index>(free_dofs_.size()); }
  /// dof -> free index, or kConstrained.
  [[nodiscard]] std::span<const Index> dof_map() const noexcept { return dof_map_; }
  /// free index -> dof.
  [[nodiscard]] std::span<const Index> free_dofs() const noexcept { return free_dofs_; }

  /// Full coefficient vector with zeros at constrained dofs.
  [[nodiscard]] DiscreteFunction expand(const Vector& free_values) const;
  /// Values at free dofs (constrained coefficients are dropped).
  [[nodiscard]] Vector restrict_to_free(const DiscreteFunction& f) const;

 private:
  std::shared_ptr<const AssembledOperators> ops_;
  std::vector<SideLabel> labels_;
  std::vector<Index> dof_map_;
  std::vector<Index> free_dofs_;
  SparseMatrix stiffness_;
  SparseMatrix mass_;
};

/// Builds the space and operators for `m`, then eliminates the Dirichlet
/// dofs of `p`. Throws InconsistentMesh when `m` was not built from `p`.
FemSystem assemble(const Mesh& m, const LabeledPolygon& p, Order order, AssemblyOptions options = {});

/// Finite element function: coefficients over all dofs of a space.
class DiscreteFunction {
 public:
  DiscreteFunction(std::shared_ptr<const FeSpace> space, Vector coefficients);

  [[nodiscard]] const FeSpace& space() const noexcept { return *space_; }
  [[nodiscard]] const std::shared_ptr<const FeSpace>& space_ptr() const noexcept { return space_; }
  [[nodiscard]] Order order() const noexcept { return space_->order(); }
  [[nodiscard]] const Vector& coefficients() const noexcept { return coefficients_; }

 private:
  std::shared_ptr<const FeSpace> space_;
  Vector coefficients_;
};

/// Nodal interpolant.
DiscreteFunction interpolate(std::shared_ptr<const FeSpace> space,
                             const std::function<double(const Point&)>& f);

/// (f^T K f) / (f^T M f) over the free dofs of `sys`.
/// Throws ZeroFunction when the M-norm vanishes relative to the coefficients.
double rayleigh_quotient(const FemSystem& sys, const DiscreteFunction& f);

/// L2 projection of the elementwise derivative grad(u) . direction onto the
/// continuous P1 space of `target`, with the dofs on the closed Dirichlet
/// part of `target` set to zero. `target` must be a P1 system on u's mesh.
///
/// Throws OrderMismatch for P1 input, InconsistentMesh for a foreign target.
DiscreteFunction derivative_test_function(const DiscreteFunction& u, const Point& direction,
                                          const FemSystem& target);

/// Elementwise integrals entering the second-derivative identity of a P2
/// function (all second derivatives are constant per element).
struct GrisvardTerms {
  double mixed_squared = 0.0;     // sum of int (d12 u)^2
  double product = 0.0;           // sum of int (d11 u)(d22 u)
  double h1_seminorm_squared = 0.0;
};

GrisvardTerms grisvard_terms(const DiscreteFunction& u);

/// |int (d12 u)^2 - int (d11 u)(d22 u)| / (|u|_{H1}^2 + 1e-300).
/// Throws OrderMismatch for P1 input.
double grisvard_residual(const DiscreteFunction& u);

/// L2 norm of u - exact, by the degree-4 rule on every element.
double l2_error(const DiscreteFunction& u, const std::function<double(const Point&)>& exact);

/// Embeds a P1 function into the P2 space on the same mesh.
DiscreteFunction prolong_to_p2(const DiscreteFunction& u, std::shared_ptr<const FeSpace> p2_space);

}  // namespace mixed_spectra
