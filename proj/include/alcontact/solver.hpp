#pragma once

#include <Eigen/Dense>

namespace alc {

/// Smooth equality-constrained problem with simple bounds:
///   min f(x)  s.t.  c(x) = 0,  lb <= x <= ub.
class ConstrainedProblem {
 public:
  virtual ~ConstrainedProblem() = default;

  virtual int dim() const = 0;
  virtual int constraint_count() const = 0;
  virtual Eigen::VectorXd lower_bounds() const = 0;
  virtual Eigen::VectorXd upper_bounds() const = 0;

  virtual double objective(const Eigen::VectorXd& x) const = 0;
  virtual void objective_gradient(const Eigen::VectorXd& x,
                                  Eigen::VectorXd& grad) const = 0;
  virtual Eigen::VectorXd residuals(const Eigen::VectorXd& x) const = 0;

  /// grad += J_c(x)^T y. Implementations exploit their own sparsity.
  virtual void add_residual_adjoint(const Eigen::VectorXd& x,
                                    const Eigen::VectorXd& y,
                                    Eigen::VectorXd& grad) const = 0;

  /// Gauss-Newton model of the penalty curvature: h = hess(f) + mu J^T J
  /// (constraint curvature dropped). The default builds both pieces by
  /// finite differences, which is fine for small problems; large problems
  /// should override with an analytic assembly.
  virtual void gauss_newton_hessian(const Eigen::VectorXd& x, double mu,
                                    Eigen::MatrixXd& h) const;
};

struct SolverOptions {
  double feas_tol = 1e-6;       // max |c| for a converged point
  double stat_tol = 1e-4;       // projected-gradient norm, scaled by 1 + |f|
  double feas_target = 1e-3;    // solver aims at feas_target * feas_tol
  double stat_target = 0.1;     // and stat_target * stat_tol
  int max_outer = 40;
  int max_inner = 100;
  double mu_init = 100.0;
  double mu_growth = 10.0;
  double mu_max = 1e8;
};

struct SolverResult {
  Eigen::VectorXd x;
  Eigen::VectorXd multipliers;
  bool converged = false;
  int outer_iterations = 0;
  int inner_iterations = 0;
  double max_constraint_violation = 0.0;
  double stationarity = 0.0;  // projected gradient of the Lagrangian, inf-norm
  double objective = 0.0;
};

/// Augmented-Lagrangian method: bound-projected limited-memory quasi-Newton
/// inner solves, first-order multiplier updates, penalty growth when the
/// constraint violation stalls. Deterministic.
SolverResult solve_constrained(const ConstrainedProblem& problem,
                               const Eigen::VectorXd& x0,
                               const SolverOptions& options = {});

}  // namespace alc
