#ifndef DGPLATE_ASSEMBLY_HPP
#define DGPLATE_ASSEMBLY_HPP

#include <functional>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <Eigen/SparseCore>

#include "dgplate/dg_space.hpp"

namespace dgplate {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Jump penalties and the zero-order weight of the flow metric.
struct PenaltyParams {
  double gamma0 = 5.0e3;
  double gamma1 = 1.1e3;
  double epsilon = 0.0;

  bool operator==(const PenaltyParams&) const = default;
};

/// Piecewise-constant symmetric spontaneous curvature, constant on strips
/// of equal width along x1. A single strip is a uniform field.
class CurvatureField {
 public:
  CurvatureField() : CurvatureField(Eigen::Matrix2d::Zero()) {}
  explicit CurvatureField(const Eigen::Matrix2d& z);
  CurvatureField(double x_min, double x_max, std::vector<Eigen::Matrix2d> strips);

  Eigen::Matrix2d at(const Eigen::Vector2d& x) const;
  bool is_zero() const;
  const std::vector<Eigen::Matrix2d>& strips() const { return strips_; }
  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  bool operator==(const CurvatureField& o) const {
    return x_min_ == o.x_min_ && x_max_ == o.x_max_ && strips_ == o.strips_;
  }

 private:
  double x_min_ = 0.0;
  double x_max_ = 1.0;
  std::vector<Eigen::Matrix2d> strips_;
};

/// Clamped position g and frame Phi on the Dirichlet edges.
struct BoundaryData {
  std::function<Eigen::Vector3d(const Eigen::Vector2d&)> g;
  std::function<Matrix32(const Eigen::Vector2d&)> phi;

  /// g(x) = (x1, x2, 0), Phi = grad g.
  static BoundaryData flat();
  /// g = 0, Phi = 0.
  static BoundaryData homogeneous();
};

/// Force density f; an empty function means f = 0.
struct LoadField {
  std::function<Eigen::Vector3d(const Eigen::Vector2d&)> f;

  bool is_zero() const { return !f; }
};

/// Largest |Phi^T Phi - I| over the Dirichlet quadrature points.
double frame_isometry_error(const DgSpace& space, const BoundaryData& data);

/// Scalar (single-component) stiffness a_h on the full skeleton. The vector
/// operator is this matrix repeated on each of the three components.
SparseMatrix assemble_stiffness_scalar(const DgSpace& space, const PenaltyParams& params);
/// Scalar discrete H^2 metric; jump terms live on interior edges only.
SparseMatrix assemble_metric_scalar(const DgSpace& space, const PenaltyParams& params);

/// Kronecker product with the 3 x 3 identity in the interleaved dof layout.
SparseMatrix expand_components(const SparseMatrix& scalar);

SparseMatrix assemble_stiffness(const DgSpace& space, const PenaltyParams& params);

struct MetricOperators {
  SparseMatrix metric;
  SparseMatrix combined;  // metric / tau + stiffness
};
MetricOperators assemble_metric(const DgSpace& space, const PenaltyParams& params, double tau);

/// G_i = l_h(phi_i): the Nitsche boundary load.
Vector assemble_nitsche_load(const DgSpace& space, const PenaltyParams& params, const BoundaryData& data);
/// (f, phi_i).
Vector assemble_load(const DgSpace& space, const LoadField& load);
/// 0.5 gamma1 |h^-1/2 Phi|^2 + 0.5 gamma0 |h^-3/2 g|^2 on the Dirichlet edges.
double nitsche_constant(const DgSpace& space, const PenaltyParams& params, const BoundaryData& data);

/// Linearized isometry constraint at a fixed state, stored as one dense
/// 3 x (3 n_basis) block per cell. Row (T, s) pairs a test function with the
/// symmetric multiplier basis e1(x)e1, e2(x)e2, e1(x)e2 + e2(x)e1.
class ConstraintOperator {
 public:
  ConstraintOperator(const DofMap& dofs, std::vector<Eigen::MatrixXd> blocks);

  Index rows() const { return dofs_.n_lambda(); }
  Index cols() const { return dofs_.n_y(); }
  const Eigen::MatrixXd& block(Index cell) const { return blocks_[cell]; }

  Vector apply(const Vector& x) const;
  Vector apply_transpose(const Vector& lambda) const;
  SparseMatrix to_sparse() const;

 private:
  DofMap dofs_;
  std::vector<Eigen::MatrixXd> blocks_;
};

ConstraintOperator assemble_constraint(const DgSpace& space, const Vector& y);

/// F_i = sum_T int_T z_kl d_kl phi_i . (d1 y x d2 y), with the cross product
/// used as is (no renormalization).
Vector assemble_bilayer_force(const DgSpace& space, const Vector& y, const CurvatureField& z);

/// Discrete single-layer energy, evaluated term by term by quadrature.
double energy_single(const DgSpace& space, const Vector& y, const BoundaryData& data, const LoadField& load,
                     const PenaltyParams& params);

/// sum_ij sum_T int_T z_ij d_ij y . (d1 y x d2 y).
double spontaneous_term(const DgSpace& space, const Vector& y, const CurvatureField& z);

/// 0.5 int |Z|^2.
double curvature_constant(const DgSpace& space, const CurvatureField& z);

/// Bilayer energy; `include_constant` adds 0.5 int |Z|^2.
double energy_bilayer(const DgSpace& space, const Vector& y, const CurvatureField& z, const BoundaryData& data,
                      const LoadField& load, const PenaltyParams& params, bool include_constant = true);

/// Squared dG energy norm including the Dirichlet data deviations.
double dg_energy_norm(const DgSpace& space, const Vector& y, const BoundaryData& data);

/// Per-cell integrals of the first fundamental form, int_T grad y^T grad y.
std::vector<Eigen::Matrix2d> cell_gram_integrals(const DgSpace& space, const Vector& y);

/// sum_T |int_T (grad y^T grad y - I)| with the Frobenius norm.
double isometry_defect(const DgSpace& space, const Vector& y);
/// Per-cell terms of isometry_defect.
Vector cell_isometry_defects(const DgSpace& space, const Vector& y);

/// Applies a scalar operator to every component of a full coefficient vector.
Vector apply_componentwise(const SparseMatrix& scalar, const Vector& y);

}  // namespace dgplate

#endif  // DGPLATE_ASSEMBLY_HPP
