#ifndef DGPLATE_FLOW_HPP
#define DGPLATE_FLOW_HPP

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/SparseCholesky>

#include "dgplate/assembly.hpp"

namespace dgplate {

class FactorizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Schur CG did not reach its tolerance; carries the residual history.
class StagnationError : public std::runtime_error {
 public:
  StagnationError(const std::string& what, std::vector<double> history)
      : std::runtime_error(what), history_(std::move(history)) {}
  const std::vector<double>& history() const { return history_; }

 private:
  std::vector<double> history_;
};

class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FlowParams {
  double tau = 5.0e-3;
  double energy_tol = 5.0e-9;
  Index max_steps = 5'000'000;
  double cg_tol = 1.0e-10;
  int cg_max_iters = 20'000;
  /// Precondition the Schur CG with the exact Schur complement of an earlier
  /// state; it is rebuilt once a solve needs more than `refresh_iters`.
  bool precondition = true;
  int refresh_iters = 8;
  /// Largest scalar system for which the dense inverse needed by the
  /// preconditioner is formed; larger problems run plain CG.
  Index dense_inverse_limit = 12'000;

  bool operator==(const FlowParams&) const = default;
};

/// Sparse LDL^T factorization of an SPD operator, applied to `components`
/// interleaved copies of the unknowns (stride `components`).
class Factorization {
 public:
  explicit Factorization(const SparseMatrix& op, int components = 1);

  Index size() const { return components_ * n_; }
  Vector apply_inverse(const Vector& b) const;
  /// Dense inverse of the scalar operator.
  Eigen::MatrixXd scalar_inverse() const;

 private:
  std::shared_ptr<const Eigen::SimplicialLDLT<SparseMatrix>> ldlt_;
  int components_;
  Index n_;
};

/// Cholesky factor of B A^-1 B^T for a fixed B.
class SchurPreconditioner {
 public:
  SchurPreconditioner(const ConstraintOperator& b, const Eigen::MatrixXd& scalar_inverse);
  Vector apply(const Vector& r) const { return llt_.solve(r); }

 private:
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

struct MultiplierSolution {
  Vector lambda;
  Vector correction;  // delta Y = A^-1 (rhs - B^T lambda)
  int iterations = 0;
  double relative_residual = 0.0;
  std::vector<double> history;
};

/// Solves B A^-1 B^T lambda = B A^-1 rhs by CG, applying the Schur operator
/// matrix-free. `warm_start` seeds the iteration; `preconditioner` is optional.
MultiplierSolution solve_multiplier(const ConstraintOperator& b, const Factorization& factorization, const Vector& rhs,
                                    const FlowParams& params, const Vector* warm_start = nullptr,
                                    const SchurPreconditioner* preconditioner = nullptr);

/// Everything the flow needs to know about the plate.
struct FlowProblem {
  const DgSpace* space = nullptr;
  PenaltyParams penalty;
  CurvatureField curvature;
  BoundaryData data = BoundaryData::flat();
  LoadField load;
};

/// Operators assembled once per run.
struct FlowOperators {
  SparseMatrix stiffness;  // scalar a_h
  SparseMatrix metric;     // scalar (.,.)_{H_h^2}
  Factorization factorization;
  Vector load;                     // G + (f, phi)
  double energy_shift = 0.0;       // Nitsche constant of E_h^0
  double curvature_constant = 0.0; // 0.5 int |Z|^2
  std::shared_ptr<const Eigen::MatrixXd> inverse;  // dense scalar A^-1, if formed
};

FlowOperators prepare_operators(const FlowProblem& problem, const FlowParams& params);

struct FlowEnergy {
  double total = 0.0;        // including 0.5 int |Z|^2
  double no_constant = 0.0;  // E_h^1
};

/// E_h^1 through the quadratic representation 0.5 Y^T A Y - G^T Y + c.
FlowEnergy flow_energy(const FlowProblem& problem, const FlowOperators& ops, const Vector& y);

struct FlowState {
  Index step = 0;
  Vector y;
  Vector lambda;
  FlowEnergy energy;
  std::shared_ptr<const SchurPreconditioner> preconditioner;
};

struct StepDiagnostics {
  Index step = 0;
  double energy_before = 0.0;
  double energy_after = 0.0;
  double energy_no_constant = 0.0;
  double delta_norm_sq = 0.0;  // |||dY|||^2 in the flow metric
  double defect = 0.0;
  int cg_iterations = 0;
  double schur_residual = 0.0;
  double constraint_residual = 0.0;  // |B dY|_inf
  double rhs_norm = 0.0;
  double min_gram_eigenvalue = 0.0;  // min over cells of eig(|T|^-1 int_T grad y^T grad y - I)
};

FlowState initial_state(const FlowProblem& problem, const FlowOperators& ops, Vector y0);

/// One semi-implicit step: reassembles B and F at the current state, solves
/// the saddle-point system through the Schur complement and updates `state`.
StepDiagnostics flow_step(FlowState& state, const FlowProblem& problem, const FlowOperators& ops,
                          const FlowParams& params);

struct FlowResult {
  FlowState state;
  std::vector<StepDiagnostics> trace;
  bool converged = false;
};

/// Called after every step; returning false stops the flow early.
using StepObserver = std::function<bool(const FlowState&, const StepDiagnostics&)>;

FlowResult run_flow(const Vector& y0, const FlowProblem& problem, const FlowParams& params,
                    const StepObserver& observer = {});
FlowResult run_flow(FlowState state, const FlowProblem& problem, const FlowOperators& ops, const FlowParams& params,
                    const StepObserver& observer = {});

}  // namespace dgplate

#endif  // DGPLATE_FLOW_HPP
