#include "alcontact/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace alc {

void ConstrainedProblem::gauss_newton_hessian(const Eigen::VectorXd& x, double mu,
                                              Eigen::MatrixXd& h) const {
  const int n = dim();
  const int m = constraint_count();
  const double step = 1e-6;
  // hess(f) by central differences of the objective gradient
  h.setZero(n, n);
  Eigen::VectorXd gp(n), gm(n);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd xp = x, xm = x;
    xp(i) += step;
    xm(i) -= step;
    objective_gradient(xp, gp);
    objective_gradient(xm, gm);
    h.col(i) = (gp - gm) / (2.0 * step);
  }
  h = 0.5 * (h + h.transpose()).eval();
  if (m > 0) {
    Eigen::MatrixXd jac(m, n);
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd xp = x, xm = x;
      xp(i) += step;
      xm(i) -= step;
      jac.col(i) = (residuals(xp) - residuals(xm)) / (2.0 * step);
    }
    h.noalias() += mu * jac.transpose() * jac;
  }
}

namespace {

Eigen::VectorXd project(const Eigen::VectorXd& x, const Eigen::VectorXd& lb,
                        const Eigen::VectorXd& ub) {
  return x.cwiseMax(lb).cwiseMin(ub);
}

double projected_gradient_norm(const Eigen::VectorXd& x, const Eigen::VectorXd& grad,
                               const Eigen::VectorXd& lb, const Eigen::VectorXd& ub) {
  return (project(x - grad, lb, ub) - x).cwiseAbs().maxCoeff();
}

/// f(x) + lambda^T c(x) + (mu/2) ||c(x)||^2 and its gradient.
class AugmentedLagrangian {
 public:
  AugmentedLagrangian(const ConstrainedProblem& problem, const Eigen::VectorXd& lambda,
                      double mu)
      : problem_(problem), lambda_(lambda), mu_(mu) {}

  double value(const Eigen::VectorXd& x) const {
    const Eigen::VectorXd c = problem_.residuals(x);
    return problem_.objective(x) + lambda_.dot(c) + 0.5 * mu_ * c.squaredNorm();
  }

  double value_and_gradient(const Eigen::VectorXd& x, Eigen::VectorXd& grad) const {
    const Eigen::VectorXd c = problem_.residuals(x);
    problem_.objective_gradient(x, grad);
    problem_.add_residual_adjoint(x, lambda_ + mu_ * c, grad);
    return problem_.objective(x) + lambda_.dot(c) + 0.5 * mu_ * c.squaredNorm();
  }

  double mu() const { return mu_; }

 private:
  const ConstrainedProblem& problem_;
  const Eigen::VectorXd& lambda_;
  double mu_;
};

struct InnerResult {
  int iterations = 0;
  double projected_gradient = 0.0;
};

/// Projected Newton on the Gauss-Newton model: solve on the inactive set,
/// backtrack along the projected arc, fall back to steepest descent when the
/// model step fails.
InnerResult minimize_augmented(const ConstrainedProblem& problem,
                               const AugmentedLagrangian& phi, Eigen::VectorXd& x,
                               const Eigen::VectorXd& lb, const Eigen::VectorXd& ub,
                               double tol, int max_iter) {
  const int n = static_cast<int>(x.size());
  Eigen::VectorXd grad(n);
  double value = phi.value_and_gradient(x, grad);
  Eigen::MatrixXd hess(n, n);
  int stagnant = 0;

  InnerResult result;
  for (int it = 0; it < max_iter; ++it) {
    result.projected_gradient = projected_gradient_norm(x, grad, lb, ub);
    if (result.projected_gradient <= tol) return result;
    ++result.iterations;

    // active bounds: pinned at the box with the gradient pushing outward
    std::vector<int> free;
    free.reserve(n);
    for (int i = 0; i < n; ++i) {
      const double eps = 1e-10 * (1.0 + std::abs(x(i)));
      const bool at_lower = x(i) <= lb(i) + eps && grad(i) > 0.0;
      const bool at_upper = x(i) >= ub(i) - eps && grad(i) < 0.0;
      if (!at_lower && !at_upper) free.push_back(i);
    }

    Eigen::VectorXd direction = Eigen::VectorXd::Zero(n);
    bool have_newton = false;
    if (!free.empty()) {
      problem.gauss_newton_hessian(x, phi.mu(), hess);
      const int nf = static_cast<int>(free.size());
      Eigen::MatrixXd hff(nf, nf);
      Eigen::VectorXd gf(nf);
      for (int a = 0; a < nf; ++a) {
        gf(a) = grad(free[a]);
        for (int b = 0; b < nf; ++b) hff(a, b) = hess(free[a], free[b]);
      }
      hff.diagonal().array() += 1e-10 * (1.0 + hff.diagonal().cwiseAbs().maxCoeff());
      const Eigen::LDLT<Eigen::MatrixXd> ldlt(hff);
      if (ldlt.info() == Eigen::Success) {
        const Eigen::VectorXd df = ldlt.solve(-gf);
        for (int a = 0; a < nf; ++a) direction(free[a]) = df(a);
        have_newton = grad.dot(direction) < 0.0;
      }
    }
    if (!have_newton) direction = -grad;

    // Armijo backtracking along the projected arc
    bool accepted = false;
    double step = 1.0;
    double value_new = 0.0;
    Eigen::VectorXd x_new;
    for (int ls = 0; ls < 60 && !accepted; ++ls) {
      x_new = project(x + step * direction, lb, ub);
      const Eigen::VectorXd dx = x_new - x;
      if (dx.cwiseAbs().maxCoeff() == 0.0) break;
      const double predicted = grad.dot(dx);
      value_new = phi.value(x_new);
      if (value_new <= value + 1e-4 * predicted && predicted < 0.0) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted && have_newton) {
      // model step failed; try the plain projected gradient
      direction = -grad;
      step = 1.0 / std::max(1.0, grad.cwiseAbs().maxCoeff());
      for (int ls = 0; ls < 60 && !accepted; ++ls) {
        x_new = project(x + step * direction, lb, ub);
        const Eigen::VectorXd dx = x_new - x;
        if (dx.cwiseAbs().maxCoeff() == 0.0) break;
        const double predicted = grad.dot(dx);
        value_new = phi.value(x_new);
        if (value_new <= value + 1e-4 * predicted && predicted < 0.0) {
          accepted = true;
          break;
        }
        step *= 0.5;
      }
    }
    if (!accepted) break;  // no measurable descent left at this tolerance

    // stop once accepted steps no longer move the merit value
    if (value - value_new <= 1e-15 * (1.0 + std::abs(value))) {
      if (++stagnant >= 2) {
        x = x_new;
        value = phi.value_and_gradient(x, grad);
        break;
      }
    } else {
      stagnant = 0;
    }

    x = x_new;
    value = phi.value_and_gradient(x, grad);
  }
  result.projected_gradient = projected_gradient_norm(x, grad, lb, ub);
  return result;
}

}  // namespace

SolverResult solve_constrained(const ConstrainedProblem& problem,
                               const Eigen::VectorXd& x0,
                               const SolverOptions& options) {
  const Eigen::VectorXd lb = problem.lower_bounds();
  const Eigen::VectorXd ub = problem.upper_bounds();
  Eigen::VectorXd x = project(x0, lb, ub);
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(problem.constraint_count());

  double mu = options.mu_init;
  double omega = 1e-2;   // inner tolerance, tightened as the iterates settle
  double eta = 1e-2;     // feasibility gate for multiplier updates

  const double feas_target = options.feas_tol * options.feas_target;

  SolverResult best;
  best.x = x;
  best.multipliers = lambda;
  best.max_constraint_violation = std::numeric_limits<double>::infinity();
  best.stationarity = std::numeric_limits<double>::infinity();
  double best_score = std::numeric_limits<double>::infinity();

  int total_inner = 0;
  int outer = 0;
  for (outer = 1; outer <= options.max_outer; ++outer) {
    const AugmentedLagrangian phi(problem, lambda, mu);
    const InnerResult inner =
        minimize_augmented(problem, phi, x, lb, ub, omega, options.max_inner);
    total_inner += inner.iterations;

    const Eigen::VectorXd c = problem.residuals(x);
    const double viol = c.size() > 0 ? c.cwiseAbs().maxCoeff() : 0.0;
    const Eigen::VectorXd lambda_trial = lambda + mu * c;

    // stationarity of the Lagrangian at the first-order multiplier estimate
    Eigen::VectorXd grad_l(x.size());
    problem.objective_gradient(x, grad_l);
    problem.add_residual_adjoint(x, lambda_trial, grad_l);
    const double stat = projected_gradient_norm(x, grad_l, lb, ub);
    const double fval = problem.objective(x);
    const double stat_scale = options.stat_tol * (1.0 + std::abs(fval));
    const double stat_target = stat_scale * options.stat_target;

    const double score = std::max(viol / options.feas_tol, stat / stat_scale);
    if (score < best_score) {
      best_score = score;
      best.x = x;
      best.multipliers = lambda_trial;
      best.max_constraint_violation = viol;
      best.stationarity = stat;
      best.objective = fval;
    }

    if (viol <= feas_target && stat <= stat_target) {
      break;
    }

    const double omega_floor = std::max(1e-9, 0.3 * stat_target);
    if (viol <= std::max(eta, feas_target)) {
      lambda = lambda_trial;
      eta = std::max(feas_target * 0.1, eta * 0.2);
      omega = std::max(omega_floor, omega * 0.2);
    } else {
      mu = std::min(mu * options.mu_growth, options.mu_max);
      omega = std::max(omega_floor, omega * 0.5);
    }
  }

  SolverResult result = best;
  result.outer_iterations = std::min(outer, options.max_outer);
  result.inner_iterations = total_inner;
  const double stat_scale = options.stat_tol * (1.0 + std::abs(result.objective));
  result.converged = result.max_constraint_violation <= options.feas_tol &&
                     result.stationarity <= stat_scale;
  return result;
}

}  // namespace alc
