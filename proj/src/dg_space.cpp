#include "dgplate/dg_space.hpp"

#include <stdexcept>

namespace dgplate {

DgSpace::DgSpace(const Mesh& mesh, int degree, int quadrature_points)
    : mesh_(&mesh),
      basis_(degree),
      cell_rule_(tensor_gauss<double>(quadrature_points)),
      edge_rule_(gauss_legendre<double>(quadrature_points)) {
  if (degree < 2) throw std::invalid_argument("DgSpace: fourth-order problems need degree >= 2");
  dofs_.n_cells = mesh.n_cells();
  dofs_.n_basis = basis_.size();
  for (const auto& p : cell_rule_.points) cell_tables_.push_back(physical_table(p));
  for (int f = 0; f < 4; ++f) {
    for (double t : edge_rule_.points) {
      face_tables_[f].push_back(physical_table(face_point(static_cast<LocalFace>(f), t)));
    }
  }
}

Eigen::Vector2d DgSpace::face_point(LocalFace face, double t) {
  switch (face) {
    case LocalFace::left: return {0.0, t};
    case LocalFace::right: return {1.0, t};
    case LocalFace::bottom: return {t, 0.0};
    case LocalFace::top: return {t, 1.0};
  }
  return {0.0, 0.0};
}

BasisJet<double> DgSpace::physical_table(const Eigen::Vector2d& ref, int max_derivative) const {
  return map_to_cell(basis_.tabulate(ref, max_derivative), mesh_->cell_width(), mesh_->cell_height());
}

FieldJet field_jet(const Eigen::Ref<const Eigen::MatrixXd>& coeffs, const BasisJet<double>& table,
                   int max_derivative) {
  FieldJet jet;
  jet.value = coeffs * table.col(0);
  if (max_derivative >= 1) {
    jet.grad.col(0) = coeffs * table.col(derivative_slot(1, 0));
    jet.grad.col(1) = coeffs * table.col(derivative_slot(0, 1));
  }
  if (max_derivative >= 2) {
    for (int k = 0; k < 2; ++k) {
      for (int l = 0; l < 2; ++l) {
        jet.hess[k].col(l) = coeffs * table.col(derivative_slot(int(k == 0) + int(l == 0), int(k == 1) + int(l == 1)));
      }
    }
  }
  if (max_derivative >= 3) {
    for (int k = 0; k < 2; ++k) {
      for (int l = 0; l < 2; ++l) {
        for (int m = 0; m < 2; ++m) {
          const int dx = int(k == 0) + int(l == 0) + int(m == 0);
          jet.third[k][l].col(m) = coeffs * table.col(derivative_slot(dx, 3 - dx));
        }
      }
    }
  }
  return jet;
}

std::vector<FieldJet> evaluate_field(const DgSpace& space, const Vector& y, Index cell,
                                     const std::vector<Eigen::Vector2d>& ref_points, int max_derivative) {
  const auto& dofs = space.dofs();
  if (y.size() != dofs.n_y()) throw std::invalid_argument("evaluate_field: coefficient length mismatch");
  const auto coeffs = cell_coefficients(dofs, y, cell);
  std::vector<FieldJet> out;
  out.reserve(ref_points.size());
  for (const auto& p : ref_points) {
    out.push_back(field_jet(coeffs, space.physical_table(p, max_derivative), max_derivative));
  }
  return out;
}

Vector interpolate(const DgSpace& space, const std::function<Eigen::Vector3d(const Eigen::Vector2d&)>& y) {
  const auto& dofs = space.dofs();
  const auto& mesh = space.mesh();
  Vector out(dofs.n_y());
  for (Index c = 0; c < mesh.n_cells(); ++c) {
    for (int b = 0; b < dofs.n_basis; ++b) {
      const Eigen::Vector3d v = y(mesh.map_to_cell(c, space.basis().node(b)));
      for (int comp = 0; comp < DofMap::kComponents; ++comp) out[dofs.displacement(c, b, comp)] = v[comp];
    }
  }
  return out;
}

std::vector<FieldJet> edge_traces(const DgSpace& space, const Vector& y, const Edge& edge, Side side,
                                  int max_derivative) {
  if (side == Side::plus && !edge.has_plus()) {
    throw std::invalid_argument("edge_traces: the plus side of a boundary edge does not exist");
  }
  const auto& dofs = space.dofs();
  if (y.size() != dofs.n_y()) throw std::invalid_argument("edge_traces: coefficient length mismatch");
  const Index cell = side == Side::minus ? edge.minus : edge.plus;
  const LocalFace face = side == Side::minus ? edge.face_minus : edge.face_plus;
  const auto coeffs = cell_coefficients(dofs, y, cell);
  std::vector<FieldJet> out;
  for (int q = 0; q < space.edge_rule().size(); ++q) {
    out.push_back(field_jet(coeffs, space.face_table(face, q), max_derivative));
  }
  return out;
}

Eigen::Vector3d flat_deformation(const Eigen::Vector2d& x) { return {x.x(), x.y(), 0.0}; }

}  // namespace dgplate
