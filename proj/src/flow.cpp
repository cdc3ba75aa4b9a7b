#include "dgplate/flow.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace dgplate {

namespace {

// Pivots below this fraction of the largest one indicate a singular operator.
constexpr double kPivotRatio = 1e-13;

}  // namespace

Factorization::Factorization(const SparseMatrix& op, int components) : components_(components), n_(op.rows()) {
  if (op.rows() != op.cols()) throw FactorizationError("factorize: operator is not square");
  if (components < 1) throw std::invalid_argument("factorize: components must be positive");
  auto ldlt = std::make_shared<Eigen::SimplicialLDLT<SparseMatrix>>(op);
  if (ldlt->info() != Eigen::Success) {
    throw FactorizationError("factorize: LDL^T failed; the operator is singular (a free plate needs epsilon > 0)");
  }
  const Vector d = ldlt->vectorD();
  const double dmax = d.cwiseAbs().maxCoeff();
  const double dmin = d.minCoeff();
  if (!(dmin > kPivotRatio * dmax)) {
    std::ostringstream os;
    os << "factorize: operator is singular or indefinite (pivot ratio " << dmin / dmax
       << "); a free plate needs epsilon > 0 to remove rigid and affine modes";
    throw FactorizationError(os.str());
  }
  ldlt_ = std::move(ldlt);
}

Vector Factorization::apply_inverse(const Vector& b) const {
  if (b.size() != size()) throw std::invalid_argument("Factorization::apply_inverse: size mismatch");
  if (components_ == 1) return ldlt_->solve(b);
  Eigen::Map<const Eigen::MatrixXd> in(b.data(), components_, n_);
  const Eigen::MatrixXd x = ldlt_->solve(Eigen::MatrixXd(in.transpose()));
  Vector out(size());
  Eigen::Map<Eigen::MatrixXd>(out.data(), components_, n_) = x.transpose();
  return out;
}

Eigen::MatrixXd Factorization::scalar_inverse() const {
  return ldlt_->solve(Eigen::MatrixXd::Identity(n_, n_));
}

SchurPreconditioner::SchurPreconditioner(const ConstraintOperator& b, const Eigen::MatrixXd& scalar_inverse) {
  const Index n_cells = b.rows() / 3;
  const Index n_basis = b.cols() / (DofMap::kComponents * n_cells);
  Eigen::MatrixXd schur = Eigen::MatrixXd::Zero(b.rows(), b.rows());
  for (int comp = 0; comp < DofMap::kComponents; ++comp) {
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(3 * n_basis * n_cells);
    for (Index c = 0; c < n_cells; ++c) {
      const auto& blk = b.block(c);
      for (int s = 0; s < 3; ++s) {
        for (Index k = 0; k < n_basis; ++k) {
          triplets.emplace_back(3 * c + s, n_basis * c + k, blk(s, DofMap::kComponents * k + comp));
        }
      }
    }
    SparseMatrix bc(b.rows(), scalar_inverse.rows());
    bc.setFromTriplets(triplets.begin(), triplets.end());
    const Eigen::MatrixXd left = bc * scalar_inverse;
    schur.noalias() += left * bc.transpose();
  }
  llt_.compute(schur);
  if (llt_.info() != Eigen::Success) throw FactorizationError("Schur preconditioner: B A^-1 B^T is not positive definite");
}

MultiplierSolution solve_multiplier(const ConstraintOperator& b, const Factorization& factorization, const Vector& rhs,
                                    const FlowParams& params, const Vector* warm_start,
                                    const SchurPreconditioner* preconditioner) {
  MultiplierSolution sol;
  const Vector base = factorization.apply_inverse(rhs);
  const Vector schur_rhs = b.apply(base);
  const double bnorm = schur_rhs.norm();
  sol.lambda = Vector::Zero(b.rows());
  if (bnorm == 0.0) {
    sol.correction = base;
    return sol;
  }

  // u tracks A^-1 B^T lambda so the correction needs no extra solve.
  Vector u = Vector::Zero(b.cols());
  if (warm_start != nullptr && warm_start->size() == b.rows() && warm_start->squaredNorm() > 0.0) {
    sol.lambda = *warm_start;
    u = factorization.apply_inverse(b.apply_transpose(sol.lambda));
  }
  Vector r = schur_rhs - b.apply(u);
  const double target = params.cg_tol * bnorm;
  double rr = r.squaredNorm();
  sol.history.push_back(std::sqrt(rr) / bnorm);
  const auto precondition = [&](const Vector& v) -> Vector {
    return preconditioner != nullptr ? preconditioner->apply(v) : v;
  };

  // Restart from the true residual when the recurrence drifts.
  for (int restart = 0; restart < 4; ++restart) {
    Vector z = precondition(r);
    double rz = r.dot(z);
    Vector p = z;
    while (std::sqrt(rr) > target) {
      if (sol.iterations >= params.cg_max_iters) {
        std::ostringstream os;
        os << "Schur CG stagnated after " << sol.iterations << " iterations, relative residual "
           << std::sqrt(rr) / bnorm;
        throw StagnationError(os.str(), sol.history);
      }
      const Vector v = factorization.apply_inverse(b.apply_transpose(p));
      const Vector sp = b.apply(v);
      const double curvature = p.dot(sp);
      if (!(curvature > 0.0)) {
        throw StagnationError("Schur CG breakdown: non-positive curvature", sol.history);
      }
      const double alpha = rz / curvature;
      sol.lambda.noalias() += alpha * p;
      u.noalias() += alpha * v;
      r.noalias() -= alpha * sp;
      rr = r.squaredNorm();
      z = precondition(r);
      const double rz_new = r.dot(z);
      p = z + (rz_new / rz) * p;
      rz = rz_new;
      ++sol.iterations;
      sol.history.push_back(std::sqrt(rr) / bnorm);
    }
    sol.correction = base - u;
    r = schur_rhs - b.apply(u);
    rr = r.squaredNorm();
    if (std::sqrt(rr) <= target) break;
  }
  sol.relative_residual = std::sqrt(rr) / bnorm;
  return sol;
}

FlowOperators prepare_operators(const FlowProblem& problem, const FlowParams& params) {
  if (problem.space == nullptr) throw std::invalid_argument("prepare_operators: missing space");
  if (!(params.tau > 0.0)) throw std::invalid_argument("prepare_operators: tau must be positive");
  const DgSpace& space = *problem.space;
  SparseMatrix stiffness = assemble_stiffness_scalar(space, problem.penalty);
  SparseMatrix metric = assemble_metric_scalar(space, problem.penalty);
  const SparseMatrix combined = (1.0 / params.tau) * metric + stiffness;
  Factorization factorization(combined, DofMap::kComponents);
  Vector load = assemble_nitsche_load(space, problem.penalty, problem.data) + assemble_load(space, problem.load);
  const double shift = nitsche_constant(space, problem.penalty, problem.data);
  const double zconst = curvature_constant(space, problem.curvature);
  std::shared_ptr<const Eigen::MatrixXd> inverse;
  if (params.precondition && stiffness.rows() <= params.dense_inverse_limit) {
    inverse = std::make_shared<const Eigen::MatrixXd>(factorization.scalar_inverse());
  }
  return {std::move(stiffness), std::move(metric), std::move(factorization), std::move(load), shift, zconst,
          std::move(inverse)};
}

FlowEnergy flow_energy(const FlowProblem& problem, const FlowOperators& ops, const Vector& y) {
  const Vector ay = apply_componentwise(ops.stiffness, y);
  const double single = 0.5 * y.dot(ay) - ops.load.dot(y) + ops.energy_shift;
  FlowEnergy e;
  e.no_constant = single - spontaneous_term(*problem.space, y, problem.curvature);
  e.total = e.no_constant + ops.curvature_constant;
  return e;
}

FlowState initial_state(const FlowProblem& problem, const FlowOperators& ops, Vector y0) {
  if (y0.size() != problem.space->dofs().n_y()) throw std::invalid_argument("initial_state: coefficient length mismatch");
  FlowState s;
  s.energy = flow_energy(problem, ops, y0);
  s.y = std::move(y0);
  s.lambda = Vector::Zero(problem.space->dofs().n_lambda());
  return s;
}

StepDiagnostics flow_step(FlowState& state, const FlowProblem& problem, const FlowOperators& ops,
                          const FlowParams& params) {
  const DgSpace& space = *problem.space;
  const ConstraintOperator b = assemble_constraint(space, state.y);
  const Vector force = assemble_bilayer_force(space, state.y, problem.curvature);
  const Vector rhs = -apply_componentwise(ops.stiffness, state.y) + force + ops.load;

  if (ops.inverse && !state.preconditioner) {
    state.preconditioner = std::make_shared<const SchurPreconditioner>(b, *ops.inverse);
  }
  MultiplierSolution sol = solve_multiplier(b, ops.factorization, rhs, params, &state.lambda,
                                            params.precondition ? state.preconditioner.get() : nullptr);
  if (state.preconditioner && sol.iterations > params.refresh_iters) state.preconditioner.reset();

  StepDiagnostics d;
  d.step = state.step + 1;
  d.energy_before = state.energy.total;
  d.cg_iterations = sol.iterations;
  d.schur_residual = sol.relative_residual;
  d.rhs_norm = rhs.norm();
  d.constraint_residual = b.apply(sol.correction).cwiseAbs().maxCoeff();
  d.delta_norm_sq = sol.correction.dot(apply_componentwise(ops.metric, sol.correction));

  state.y += sol.correction;
  state.lambda = std::move(sol.lambda);
  state.step += 1;
  state.energy = flow_energy(problem, ops, state.y);
  if (!std::isfinite(state.energy.total) || !state.y.allFinite()) {
    throw DivergenceError("flow diverged at step " + std::to_string(state.step) + ": non-finite energy");
  }
  d.energy_after = state.energy.total;
  d.energy_no_constant = state.energy.no_constant;

  const auto gram = cell_gram_integrals(space, state.y);
  const double area = space.mesh().cell_area();
  double defect = 0.0;
  double min_eig = std::numeric_limits<double>::infinity();
  for (const auto& g : gram) {
    const Eigen::Matrix2d excess = g / area - Eigen::Matrix2d::Identity();
    defect += area * excess.norm();
    min_eig = std::min(min_eig, Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(excess, Eigen::EigenvaluesOnly)
                                    .eigenvalues()
                                    .minCoeff());
  }
  d.defect = defect;
  d.min_gram_eigenvalue = min_eig;
  return d;
}

FlowResult run_flow(FlowState state, const FlowProblem& problem, const FlowOperators& ops, const FlowParams& params,
                    const StepObserver& observer) {
  FlowResult result;
  while (state.step < params.max_steps) {
    StepDiagnostics d = flow_step(state, problem, ops, params);
    result.trace.push_back(d);
    const bool done = std::abs(d.energy_after - d.energy_before) < params.energy_tol;
    if (observer && !observer(state, d)) break;
    if (done) {
      result.converged = true;
      break;
    }
  }
  result.state = std::move(state);
  return result;
}

FlowResult run_flow(const Vector& y0, const FlowProblem& problem, const FlowParams& params,
                    const StepObserver& observer) {
  const FlowOperators ops = prepare_operators(problem, params);
  return run_flow(initial_state(problem, ops, y0), problem, ops, params, observer);
}

}  // namespace dgplate
