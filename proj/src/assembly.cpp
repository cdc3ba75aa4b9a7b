#include "dgplate/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dgplate {

namespace {

constexpr int kXX = derivative_slot(2, 0);
constexpr int kXY = derivative_slot(1, 1);
constexpr int kYY = derivative_slot(0, 2);

// Basis quantities on one side of an edge at one quadrature point.
struct SideTrace {
  Eigen::VectorXd value;
  Eigen::MatrixXd grad;        // n_basis x 2
  Eigen::MatrixXd dmu_grad;    // n_basis x 2, (D^2 phi) mu
  Eigen::VectorXd dmu_lap;     // n_basis, mu . grad(Laplacian phi)
};

SideTrace side_trace(const BasisJet<double>& t, const Eigen::Vector2d& mu) {
  SideTrace s;
  s.value = t.col(0);
  s.grad.resize(t.rows(), 2);
  s.grad.col(0) = t.col(derivative_slot(1, 0));
  s.grad.col(1) = t.col(derivative_slot(0, 1));
  s.dmu_grad.resize(t.rows(), 2);
  s.dmu_grad.col(0) = mu.x() * t.col(kXX) + mu.y() * t.col(kXY);
  s.dmu_grad.col(1) = mu.x() * t.col(kXY) + mu.y() * t.col(kYY);
  s.dmu_lap = mu.x() * (t.col(derivative_slot(3, 0)) + t.col(derivative_slot(1, 2))) +
              mu.y() * (t.col(derivative_slot(2, 1)) + t.col(derivative_slot(0, 3)));
  return s;
}

// Jumps and averages of the local basis on one edge at one quadrature point.
// Rows 0..n-1 belong to the minus cell, n..2n-1 to the plus cell (if any).
struct EdgeBasis {
  Eigen::VectorXd jump;
  Eigen::MatrixXd jump_grad;
  Eigen::MatrixXd avg_dmu_grad;
  Eigen::VectorXd avg_dmu_lap;
};

EdgeBasis edge_basis(const DgSpace& space, const Edge& e, int q) {
  const int n = space.n_basis();
  const SideTrace m = side_trace(space.face_table(e.face_minus, q), e.normal);
  EdgeBasis b;
  if (!e.has_plus()) {
    b.jump = m.value;
    b.jump_grad = m.grad;
    b.avg_dmu_grad = m.dmu_grad;
    b.avg_dmu_lap = m.dmu_lap;
    return b;
  }
  const SideTrace p = side_trace(space.face_table(e.face_plus, q), e.normal);
  b.jump.resize(2 * n);
  b.jump << m.value, -p.value;
  b.jump_grad.resize(2 * n, 2);
  b.jump_grad << m.grad, -p.grad;
  b.avg_dmu_grad.resize(2 * n, 2);
  b.avg_dmu_grad << 0.5 * m.dmu_grad, 0.5 * p.dmu_grad;
  b.avg_dmu_lap.resize(2 * n);
  b.avg_dmu_lap << 0.5 * m.dmu_lap, 0.5 * p.dmu_lap;
  return b;
}

Eigen::MatrixXd volume_hessian_matrix(const DgSpace& space, double epsilon) {
  const int n = space.n_basis();
  const double area = space.mesh().cell_area();
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
  for (int q = 0; q < space.cell_rule().size(); ++q) {
    const auto& t = space.cell_table(q);
    const double w = space.cell_rule().weights[q] * area;
    k.noalias() += w * (t.col(kXX) * t.col(kXX).transpose() + 2.0 * t.col(kXY) * t.col(kXY).transpose() +
                        t.col(kYY) * t.col(kYY).transpose());
    if (epsilon != 0.0) k.noalias() += (w * epsilon) * t.col(0) * t.col(0).transpose();
  }
  return k;
}

std::vector<Index> edge_scalar_dofs(const DofMap& dofs, const Edge& e) {
  std::vector<Index> idx;
  for (int b = 0; b < dofs.n_basis; ++b) idx.push_back(dofs.scalar(e.minus, b));
  if (e.has_plus()) {
    for (int b = 0; b < dofs.n_basis; ++b) idx.push_back(dofs.scalar(e.plus, b));
  }
  return idx;
}

void scatter(std::vector<Eigen::Triplet<double>>& triplets, const std::vector<Index>& idx, const Eigen::MatrixXd& local) {
  for (std::size_t i = 0; i < idx.size(); ++i) {
    for (std::size_t j = 0; j < idx.size(); ++j) {
      if (local(i, j) != 0.0) triplets.emplace_back(idx[i], idx[j], local(i, j));
    }
  }
}

enum class Operator { stiffness, metric };

SparseMatrix assemble_scalar(const DgSpace& space, const PenaltyParams& params, Operator op) {
  const auto& mesh = space.mesh();
  const auto& dofs = space.dofs();
  const int n = space.n_basis();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(mesh.n_cells()) * n * n * 5);

  const Eigen::MatrixXd vol = volume_hessian_matrix(space, op == Operator::metric ? params.epsilon : 0.0);
  for (Index c = 0; c < mesh.n_cells(); ++c) {
    std::vector<Index> idx(n);
    for (int b = 0; b < n; ++b) idx[b] = dofs.scalar(c, b);
    scatter(triplets, idx, vol);
  }

  const auto skel = skeleton(mesh);
  auto add_edge = [&](Index k) {
    const Edge& e = mesh.edges[k];
    const double h = e.length;
    const int m = e.has_plus() ? 2 * n : n;
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(m, m);
    for (int q = 0; q < space.edge_rule().size(); ++q) {
      const double w = space.edge_rule().weights[q] * h;
      const EdgeBasis eb = edge_basis(space, e, q);
      if (op == Operator::stiffness) {
        local.noalias() -= w * (eb.jump_grad * eb.avg_dmu_grad.transpose() + eb.avg_dmu_grad * eb.jump_grad.transpose());
        local.noalias() += w * (eb.jump * eb.avg_dmu_lap.transpose() + eb.avg_dmu_lap * eb.jump.transpose());
        local.noalias() += (w * params.gamma1 / h) * eb.jump_grad * eb.jump_grad.transpose();
        local.noalias() += (w * params.gamma0 / (h * h * h)) * eb.jump * eb.jump.transpose();
      } else {
        local.noalias() += (w / h) * eb.jump_grad * eb.jump_grad.transpose();
        local.noalias() += (w / (h * h * h)) * eb.jump * eb.jump.transpose();
      }
    }
    scatter(triplets, edge_scalar_dofs(dofs, e), local);
  };
  for (Index k : skel.interior) add_edge(k);
  if (op == Operator::stiffness) {
    for (Index k : skel.dirichlet) add_edge(k);
  }

  SparseMatrix out(dofs.n_scalar(), dofs.n_scalar());
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

Matrix32 dmu_grad(const FieldJet& j, const Eigen::Vector2d& mu) { return mu.x() * j.hess[0] + mu.y() * j.hess[1]; }

Eigen::Vector3d dmu_lap(const FieldJet& j, const Eigen::Vector2d& mu) {
  Eigen::Vector3d out = Eigen::Vector3d::Zero();
  for (int l = 0; l < 2; ++l) out += mu[l] * (j.third[l][0].col(0) + j.third[l][1].col(1));
  return out;
}

double hessian_norm_sq(const FieldJet& j) { return j.hess[0].squaredNorm() + j.hess[1].squaredNorm(); }

}  // namespace

CurvatureField::CurvatureField(const Eigen::Matrix2d& z) : strips_{z} {}

CurvatureField::CurvatureField(double x_min, double x_max, std::vector<Eigen::Matrix2d> strips)
    : x_min_(x_min), x_max_(x_max), strips_(std::move(strips)) {
  if (strips_.empty() || !(x_min < x_max)) throw std::invalid_argument("CurvatureField: need at least one strip");
}

Eigen::Matrix2d CurvatureField::at(const Eigen::Vector2d& x) const {
  if (strips_.size() == 1) return strips_.front();
  const double s = (x.x() - x_min_) / (x_max_ - x_min_) * static_cast<double>(strips_.size());
  const auto k = static_cast<std::ptrdiff_t>(std::floor(s));
  const auto last = static_cast<std::ptrdiff_t>(strips_.size()) - 1;
  return strips_[static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(k, 0, last))];
}

bool CurvatureField::is_zero() const {
  for (const auto& z : strips_) {
    if (!z.isZero(0.0)) return false;
  }
  return true;
}

BoundaryData BoundaryData::flat() {
  return {[](const Eigen::Vector2d& x) { return flat_deformation(x); },
          [](const Eigen::Vector2d&) {
            Matrix32 p = Matrix32::Zero();
            p(0, 0) = 1.0;
            p(1, 1) = 1.0;
            return p;
          }};
}

BoundaryData BoundaryData::homogeneous() {
  return {[](const Eigen::Vector2d&) { return Eigen::Vector3d::Zero().eval(); },
          [](const Eigen::Vector2d&) { return Matrix32::Zero().eval(); }};
}

double frame_isometry_error(const DgSpace& space, const BoundaryData& data) {
  const auto& mesh = space.mesh();
  double err = 0.0;
  for (Index k : skeleton(mesh).dirichlet) {
    const Edge& e = mesh.edges[k];
    for (double t : space.edge_rule().points) {
      const Matrix32 p = data.phi(mesh.edge_point(e, t));
      err = std::max(err, (p.transpose() * p - Eigen::Matrix2d::Identity()).norm());
    }
  }
  return err;
}

SparseMatrix assemble_stiffness_scalar(const DgSpace& space, const PenaltyParams& params) {
  return assemble_scalar(space, params, Operator::stiffness);
}

SparseMatrix assemble_metric_scalar(const DgSpace& space, const PenaltyParams& params) {
  return assemble_scalar(space, params, Operator::metric);
}

SparseMatrix expand_components(const SparseMatrix& scalar) {
  constexpr int d = DofMap::kComponents;
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(scalar.nonZeros()) * d);
  for (int k = 0; k < scalar.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(scalar, k); it; ++it) {
      for (int c = 0; c < d; ++c) triplets.emplace_back(d * it.row() + c, d * it.col() + c, it.value());
    }
  }
  SparseMatrix out(d * scalar.rows(), d * scalar.cols());
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

SparseMatrix assemble_stiffness(const DgSpace& space, const PenaltyParams& params) {
  return expand_components(assemble_stiffness_scalar(space, params));
}

MetricOperators assemble_metric(const DgSpace& space, const PenaltyParams& params, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("assemble_metric: tau must be positive");
  const SparseMatrix m = assemble_metric_scalar(space, params);
  const SparseMatrix a = assemble_stiffness_scalar(space, params);
  SparseMatrix combined = (1.0 / tau) * m + a;
  return {expand_components(m), expand_components(combined)};
}

Vector assemble_nitsche_load(const DgSpace& space, const PenaltyParams& params, const BoundaryData& data) {
  const auto& mesh = space.mesh();
  const auto& dofs = space.dofs();
  Vector out = Vector::Zero(dofs.n_y());
  for (Index k : skeleton(mesh).dirichlet) {
    const Edge& e = mesh.edges[k];
    const double h = e.length;
    for (int q = 0; q < space.edge_rule().size(); ++q) {
      const double w = space.edge_rule().weights[q] * h;
      const Eigen::Vector2d x = mesh.edge_point(e, space.edge_rule().points[q]);
      const Eigen::Vector3d g = data.g(x);
      const Matrix32 phi = data.phi(x);
      const SideTrace s = side_trace(space.face_table(e.face_minus, q), e.normal);
      for (int b = 0; b < dofs.n_basis; ++b) {
        for (int c = 0; c < DofMap::kComponents; ++c) {
          const double term = -s.dmu_grad.row(b).dot(phi.row(c)) + s.dmu_lap[b] * g[c] +
                              params.gamma1 / h * s.grad.row(b).dot(phi.row(c)) +
                              params.gamma0 / (h * h * h) * s.value[b] * g[c];
          out[dofs.displacement(e.minus, b, c)] += w * term;
        }
      }
    }
  }
  return out;
}

Vector assemble_load(const DgSpace& space, const LoadField& load) {
  const auto& dofs = space.dofs();
  Vector out = Vector::Zero(dofs.n_y());
  if (load.is_zero()) return out;
  const auto& mesh = space.mesh();
  const double area = mesh.cell_area();
  for (Index c = 0; c < mesh.n_cells(); ++c) {
    for (int q = 0; q < space.cell_rule().size(); ++q) {
      const Eigen::Vector3d f = load.f(mesh.map_to_cell(c, space.cell_rule().points[q]));
      const double w = space.cell_rule().weights[q] * area;
      const auto& t = space.cell_table(q);
      for (int b = 0; b < dofs.n_basis; ++b) {
        for (int k = 0; k < 3; ++k) out[dofs.displacement(c, b, k)] += w * f[k] * t(b, 0);
      }
    }
  }
  return out;
}

double nitsche_constant(const DgSpace& space, const PenaltyParams& params, const BoundaryData& data) {
  const auto& mesh = space.mesh();
  double sum = 0.0;
  for (Index k : skeleton(mesh).dirichlet) {
    const Edge& e = mesh.edges[k];
    const double h = e.length;
    for (int q = 0; q < space.edge_rule().size(); ++q) {
      const double w = space.edge_rule().weights[q] * h;
      const Eigen::Vector2d x = mesh.edge_point(e, space.edge_rule().points[q]);
      sum += w * (0.5 * params.gamma1 / h * data.phi(x).squaredNorm() +
                  0.5 * params.gamma0 / (h * h * h) * data.g(x).squaredNorm());
    }
  }
  return sum;
}

ConstraintOperator::ConstraintOperator(const DofMap& dofs, std::vector<Eigen::MatrixXd> blocks)
    : dofs_(dofs), blocks_(std::move(blocks)) {
  if (static_cast<Index>(blocks_.size()) != dofs.n_cells) {
    throw std::invalid_argument("ConstraintOperator: one block per cell expected");
  }
}

Vector ConstraintOperator::apply(const Vector& x) const {
  Vector out(rows());
  const int m = dofs_.cell_dofs();
  for (Index c = 0; c < dofs_.n_cells; ++c) {
    out.segment<3>(3 * c).noalias() = blocks_[c] * x.segment(c * m, m);
  }
  return out;
}

Vector ConstraintOperator::apply_transpose(const Vector& lambda) const {
  Vector out(cols());
  const int m = dofs_.cell_dofs();
  for (Index c = 0; c < dofs_.n_cells; ++c) {
    out.segment(c * m, m).noalias() = blocks_[c].transpose() * lambda.segment<3>(3 * c);
  }
  return out;
}

SparseMatrix ConstraintOperator::to_sparse() const {
  std::vector<Eigen::Triplet<double>> triplets;
  const int m = dofs_.cell_dofs();
  for (Index c = 0; c < dofs_.n_cells; ++c) {
    for (int s = 0; s < 3; ++s) {
      for (int j = 0; j < m; ++j) {
        if (blocks_[c](s, j) != 0.0) triplets.emplace_back(dofs_.multiplier(c, s), c * m + j, blocks_[c](s, j));
      }
    }
  }
  SparseMatrix out(rows(), cols());
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

ConstraintOperator assemble_constraint(const DgSpace& space, const Vector& y) {
  const auto& dofs = space.dofs();
  if (y.size() != dofs.n_y()) throw std::invalid_argument("assemble_constraint: coefficient length mismatch");
  const double area = space.mesh().cell_area();
  const int n = dofs.n_basis;
  std::vector<Eigen::MatrixXd> blocks(static_cast<std::size_t>(dofs.n_cells));
#pragma omp parallel for schedule(static)
  for (Index c = 0; c < dofs.n_cells; ++c) {
    Eigen::MatrixXd blk = Eigen::MatrixXd::Zero(3, dofs.cell_dofs());
    const auto coeffs = cell_coefficients(dofs, y, c);
    for (int q = 0; q < space.cell_rule().size(); ++q) {
      const auto& t = space.cell_table(q);
      const double w = 2.0 * space.cell_rule().weights[q] * area;
      const Eigen::Vector3d d1 = coeffs * t.col(derivative_slot(1, 0));
      const Eigen::Vector3d d2 = coeffs * t.col(derivative_slot(0, 1));
      for (int b = 0; b < n; ++b) {
        const double p1 = t(b, derivative_slot(1, 0));
        const double p2 = t(b, derivative_slot(0, 1));
        for (int k = 0; k < 3; ++k) {
          blk(0, 3 * b + k) += w * p1 * d1[k];
          blk(1, 3 * b + k) += w * p2 * d2[k];
          blk(2, 3 * b + k) += w * (p1 * d2[k] + p2 * d1[k]);
        }
      }
    }
    blocks[c] = std::move(blk);
  }
  return {dofs, std::move(blocks)};
}

Vector assemble_bilayer_force(const DgSpace& space, const Vector& y, const CurvatureField& z) {
  const auto& dofs = space.dofs();
  const auto& mesh = space.mesh();
  Vector out = Vector::Zero(dofs.n_y());
  if (z.is_zero()) return out;
  const double area = mesh.cell_area();
#pragma omp parallel for schedule(static)
  for (Index c = 0; c < dofs.n_cells; ++c) {
    const auto coeffs = cell_coefficients(dofs, y, c);
    Eigen::Map<Eigen::MatrixXd> local(out.data() + c * dofs.cell_dofs(), 3, dofs.n_basis);
    for (int q = 0; q < space.cell_rule().size(); ++q) {
      const auto& t = space.cell_table(q);
      const double w = space.cell_rule().weights[q] * area;
      const Eigen::Vector3d d1 = coeffs * t.col(derivative_slot(1, 0));
      const Eigen::Vector3d d2 = coeffs * t.col(derivative_slot(0, 1));
      const Eigen::Vector3d normal = d1.cross(d2);
      const Eigen::Matrix2d zq = z.at(mesh.map_to_cell(c, space.cell_rule().points[q]));
      const Eigen::VectorXd contracted =
          zq(0, 0) * t.col(kXX) + (zq(0, 1) + zq(1, 0)) * t.col(kXY) + zq(1, 1) * t.col(kYY);
      local.noalias() += w * normal * contracted.transpose();
    }
  }
  return out;
}

double energy_single(const DgSpace& space, const Vector& y, const BoundaryData& data, const LoadField& load,
                     const PenaltyParams& params) {
  const auto& mesh = space.mesh();
  const auto& dofs = space.dofs();
  if (y.size() != dofs.n_y()) throw std::invalid_argument("energy_single: coefficient length mismatch");
  const double area = mesh.cell_area();

  double volume = 0.0;
  for (Index c = 0; c < mesh.n_cells(); ++c) {
    const auto coeffs = cell_coefficients(dofs, y, c);
    for (int q = 0; q < space.cell_rule().size(); ++q) {
      const FieldJet j = field_jet(coeffs, space.cell_table(q), 2);
      const double w = space.cell_rule().weights[q] * area;
      volume += 0.5 * w * hessian_norm_sq(j);
      if (!load.is_zero()) volume -= w * load.f(mesh.map_to_cell(c, space.cell_rule().points[q])).dot(j.value);
    }
  }

  double edges = 0.0;
  const auto skel = skeleton(mesh);
  for (Index k : skel.interior) {
    const Edge& e = mesh.edges[k];
    const double h = e.length;
    const auto tm = edge_traces(space, y, e, Side::minus);
    const auto tp = edge_traces(space, y, e, Side::plus);
    for (int q = 0; q < space.edge_rule().size(); ++q) {
      const double w = space.edge_rule().weights[q] * h;
      const Eigen::Vector3d jump = tm[q].value - tp[q].value;
      const Matrix32 jump_grad = tm[q].grad - tp[q].grad;
      const Matrix32 avg_dmu_grad = 0.5 * (dmu_grad(tm[q], e.normal) + dmu_grad(tp[q], e.normal));
      const Eigen::Vector3d avg_dmu_lap = 0.5 * (dmu_lap(tm[q], e.normal) + dmu_lap(tp[q], e.normal));
      edges += w * (-(avg_dmu_grad.cwiseProduct(jump_grad)).sum() + avg_dmu_lap.dot(jump) +
                    0.5 * params.gamma1 / h * jump_grad.squaredNorm() +
                    0.5 * params.gamma0 / (h * h * h) * jump.squaredNorm());
    }
  }
  for (Index k : skel.dirichlet) {
    const Edge& e = mesh.edges[k];
    const double h = e.length;
    const auto tm = edge_traces(space, y, e, Side::minus);
    for (int q = 0; q < space.edge_rule().size(); ++q) {
      const double w = space.edge_rule().weights[q] * h;
      const Eigen::Vector2d x = mesh.edge_point(e, space.edge_rule().points[q]);
      const Eigen::Vector3d dev = tm[q].value - data.g(x);
      const Matrix32 dev_grad = tm[q].grad - data.phi(x);
      edges += w * (-(dmu_grad(tm[q], e.normal).cwiseProduct(dev_grad)).sum() + dmu_lap(tm[q], e.normal).dot(dev) +
                    0.5 * params.gamma1 / h * dev_grad.squaredNorm() +
                    0.5 * params.gamma0 / (h * h * h) * dev.squaredNorm());
    }
  }
  return volume + edges;
}

double spontaneous_term(const DgSpace& space, const Vector& y, const CurvatureField& z) {
  const auto& mesh = space.mesh();
  const auto& dofs = space.dofs();
  if (z.is_zero()) return 0.0;
  const double area = mesh.cell_area();
  Vector per_cell(mesh.n_cells());
#pragma omp parallel for schedule(static)
  for (Index c = 0; c < mesh.n_cells(); ++c) {
    const auto coeffs = cell_coefficients(dofs, y, c);
    double sum = 0.0;
    for (int q = 0; q < space.cell_rule().size(); ++q) {
      const auto& t = space.cell_table(q);
      const Eigen::Vector3d d1 = coeffs * t.col(derivative_slot(1, 0));
      const Eigen::Vector3d d2 = coeffs * t.col(derivative_slot(0, 1));
      const Eigen::Vector3d normal = d1.cross(d2);
      const Eigen::Matrix2d zq = z.at(mesh.map_to_cell(c, space.cell_rule().points[q]));
      const double h11 = normal.dot(coeffs * t.col(kXX));
      const double h12 = normal.dot(coeffs * t.col(kXY));
      const double h22 = normal.dot(coeffs * t.col(kYY));
      sum += space.cell_rule().weights[q] * (zq(0, 0) * h11 + (zq(0, 1) + zq(1, 0)) * h12 + zq(1, 1) * h22);
    }
    per_cell[c] = sum * area;
  }
  return per_cell.sum();
}

double curvature_constant(const DgSpace& space, const CurvatureField& z) {
  const auto& mesh = space.mesh();
  double sum = 0.0;
  for (Index c = 0; c < mesh.n_cells(); ++c) {
    for (int q = 0; q < space.cell_rule().size(); ++q) {
      sum += space.cell_rule().weights[q] * z.at(mesh.map_to_cell(c, space.cell_rule().points[q])).squaredNorm();
    }
  }
  return 0.5 * sum * mesh.cell_area();
}

double energy_bilayer(const DgSpace& space, const Vector& y, const CurvatureField& z, const BoundaryData& data,
                      const LoadField& load, const PenaltyParams& params, bool include_constant) {
  double e = energy_single(space, y, data, load, params) - spontaneous_term(space, y, z);
  if (include_constant) e += curvature_constant(space, z);
  return e;
}

double dg_energy_norm(const DgSpace& space, const Vector& y, const BoundaryData& data) {
  const auto& mesh = space.mesh();
  const auto& dofs = space.dofs();
  const double area = mesh.cell_area();
  double sum = 0.0;
  for (Index c = 0; c < mesh.n_cells(); ++c) {
    const auto coeffs = cell_coefficients(dofs, y, c);
    for (int q = 0; q < space.cell_rule().size(); ++q) {
      sum += space.cell_rule().weights[q] * area * hessian_norm_sq(field_jet(coeffs, space.cell_table(q), 2));
    }
  }
  const auto skel = skeleton(mesh);
  for (Index k : skel.interior) {
    const Edge& e = mesh.edges[k];
    const double h = e.length;
    const auto tm = edge_traces(space, y, e, Side::minus, 1);
    const auto tp = edge_traces(space, y, e, Side::plus, 1);
    for (int q = 0; q < space.edge_rule().size(); ++q) {
      const double w = space.edge_rule().weights[q] * h;
      sum += w * ((tm[q].grad - tp[q].grad).squaredNorm() / h + (tm[q].value - tp[q].value).squaredNorm() / (h * h * h));
    }
  }
  for (Index k : skel.dirichlet) {
    const Edge& e = mesh.edges[k];
    const double h = e.length;
    const auto tm = edge_traces(space, y, e, Side::minus, 1);
    for (int q = 0; q < space.edge_rule().size(); ++q) {
      const double w = space.edge_rule().weights[q] * h;
      const Eigen::Vector2d x = mesh.edge_point(e, space.edge_rule().points[q]);
      sum += w * ((tm[q].grad - data.phi(x)).squaredNorm() / h + (tm[q].value - data.g(x)).squaredNorm() / (h * h * h));
    }
  }
  return sum;
}

std::vector<Eigen::Matrix2d> cell_gram_integrals(const DgSpace& space, const Vector& y) {
  const auto& dofs = space.dofs();
  const double area = space.mesh().cell_area();
  std::vector<Eigen::Matrix2d> out(static_cast<std::size_t>(dofs.n_cells));
#pragma omp parallel for schedule(static)
  for (Index c = 0; c < dofs.n_cells; ++c) {
    const auto coeffs = cell_coefficients(dofs, y, c);
    Eigen::Matrix2d g = Eigen::Matrix2d::Zero();
    for (int q = 0; q < space.cell_rule().size(); ++q) {
      const auto& t = space.cell_table(q);
      Matrix32 grad;
      grad.col(0) = coeffs * t.col(derivative_slot(1, 0));
      grad.col(1) = coeffs * t.col(derivative_slot(0, 1));
      g.noalias() += space.cell_rule().weights[q] * grad.transpose() * grad;
    }
    out[c] = area * g;
  }
  return out;
}

Vector cell_isometry_defects(const DgSpace& space, const Vector& y) {
  const auto gram = cell_gram_integrals(space, y);
  const double area = space.mesh().cell_area();
  Vector out(static_cast<Index>(gram.size()));
  for (std::size_t c = 0; c < gram.size(); ++c) {
    out[static_cast<Index>(c)] = (gram[c] - area * Eigen::Matrix2d::Identity()).norm();
  }
  return out;
}

double isometry_defect(const DgSpace& space, const Vector& y) { return cell_isometry_defects(space, y).sum(); }

Vector apply_componentwise(const SparseMatrix& scalar, const Vector& y) {
  constexpr int d = DofMap::kComponents;
  if (y.size() != d * scalar.cols()) throw std::invalid_argument("apply_componentwise: size mismatch");
  Eigen::Map<const Eigen::MatrixXd> in(y.data(), d, scalar.cols());
  Vector out(d * scalar.rows());
  Eigen::Map<Eigen::MatrixXd> res(out.data(), d, scalar.rows());
  res = (scalar * in.transpose()).transpose();
  return out;
}

}  // namespace dgplate
