#ifndef DGPLATE_DG_SPACE_HPP
#define DGPLATE_DG_SPACE_HPP

#include <array>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "dgplate/mesh.hpp"
#include "dgplate/reference_basis.hpp"

namespace dgplate {

using Vector = Eigen::VectorXd;
using Matrix32 = Eigen::Matrix<double, 3, 2>;

/// Cell-major layout of the deformation and multiplier unknowns.
///
/// Displacement dof (cell, basis b, component c) sits at
/// cell * 3 * n_basis + 3 * b + c, so every scalar component is a strided
/// view of stride 3 over the scalar index cell * n_basis + b. The three
/// multiplier slots of a cell follow the same cell-major order.
struct DofMap {
  Index n_cells = 0;
  int n_basis = 9;

  static constexpr int kComponents = 3;
  static constexpr int kMultiplierSlots = 3;

  int cell_dofs() const { return kComponents * n_basis; }
  Index n_scalar() const { return n_cells * n_basis; }
  Index n_y() const { return n_cells * cell_dofs(); }
  Index n_lambda() const { return n_cells * kMultiplierSlots; }
  Index displacement(Index cell, int basis, int component) const {
    return cell * cell_dofs() + kComponents * basis + component;
  }
  Index scalar(Index cell, int basis) const { return cell * n_basis + basis; }
  Index multiplier(Index cell, int slot) const { return cell * kMultiplierSlots + slot; }
};

/// Value and derivatives of a vector field y: R^2 -> R^3 at one point.
/// grad.col(k) = d_k y, hess[k].col(l) = d_kl y, third[k][l].col(m) = d_klm y.
struct FieldJet {
  Eigen::Vector3d value = Eigen::Vector3d::Zero();
  Matrix32 grad = Matrix32::Zero();
  std::array<Matrix32, 2> hess{Matrix32::Zero(), Matrix32::Zero()};
  std::array<std::array<Matrix32, 2>, 2> third{
      {{Matrix32::Zero(), Matrix32::Zero()}, {Matrix32::Zero(), Matrix32::Zero()}}};
};

/// Discontinuous Q_k space on a rectangular mesh, with the cell and edge
/// quadrature used by every integral in the library.
///
/// All cells are congruent, so basis tables are tabulated once on the
/// reference square and rescaled to physical derivatives.
class DgSpace {
 public:
  DgSpace(const Mesh& mesh, int degree = 2, int quadrature_points = 4);

  const Mesh& mesh() const { return *mesh_; }
  const DofMap& dofs() const { return dofs_; }
  const TensorBasis<double>& basis() const { return basis_; }
  int degree() const { return basis_.degree(); }
  int n_basis() const { return basis_.size(); }

  const QuadratureRule2D<double>& cell_rule() const { return cell_rule_; }
  const QuadratureRule1D<double>& edge_rule() const { return edge_rule_; }

  /// Physical basis partials at cell quadrature point q.
  const BasisJet<double>& cell_table(int q) const { return cell_tables_[q]; }
  /// Physical basis partials at edge quadrature point q on local face `face`.
  const BasisJet<double>& face_table(LocalFace face, int q) const {
    return face_tables_[static_cast<int>(face)][q];
  }
  /// Reference coordinate of edge parameter t on local face `face`.
  static Eigen::Vector2d face_point(LocalFace face, double t);

  /// Physical basis partials at an arbitrary reference point.
  BasisJet<double> physical_table(const Eigen::Vector2d& ref, int max_derivative = kMaxDerivative) const;

 private:
  const Mesh* mesh_;
  DofMap dofs_;
  TensorBasis<double> basis_;
  QuadratureRule2D<double> cell_rule_;
  QuadratureRule1D<double> edge_rule_;
  std::vector<BasisJet<double>> cell_tables_;
  std::array<std::vector<BasisJet<double>>, 4> face_tables_;
};

/// Coefficients of `cell` as a 3 x n_basis matrix (row = component).
inline Eigen::Map<const Eigen::MatrixXd> cell_coefficients(const DofMap& dofs, const Vector& y, Index cell) {
  return {y.data() + cell * dofs.cell_dofs(), DofMap::kComponents, dofs.n_basis};
}

/// Combines cell coefficients with a physical basis table.
FieldJet field_jet(const Eigen::Ref<const Eigen::MatrixXd>& coeffs, const BasisJet<double>& table,
                   int max_derivative = kMaxDerivative);

/// Evaluates y_h and its derivatives at reference points of `cell`.
std::vector<FieldJet> evaluate_field(const DgSpace& space, const Vector& y, Index cell,
                                     const std::vector<Eigen::Vector2d>& ref_points, int max_derivative = kMaxDerivative);

/// Nodal Lagrange interpolation, cell by cell.
Vector interpolate(const DgSpace& space, const std::function<Eigen::Vector3d(const Eigen::Vector2d&)>& y);

enum class Side { minus, plus };

/// One-sided traces of y_h at the edge quadrature points.
/// Requesting the plus side of an edge without a plus cell throws.
std::vector<FieldJet> edge_traces(const DgSpace& space, const Vector& y, const Edge& edge, Side side,
                                  int max_derivative = kMaxDerivative);

/// Identity deformation y(x) = (x1, x2, 0).
Eigen::Vector3d flat_deformation(const Eigen::Vector2d& x);

}  // namespace dgplate

#endif  // DGPLATE_DG_SPACE_HPP
