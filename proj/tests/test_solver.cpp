#include <doctest.h>

#include <cmath>
#include <functional>
#include <utility>

#include "alcontact/solver.hpp"

using namespace alc;

namespace {

/// Ad-hoc problem from closures, with dense residual Jacobian by finite
/// differences for the adjoint (fine for tiny toy problems).
class ToyProblem final : public ConstrainedProblem {
 public:
  int n = 0;
  Eigen::VectorXd lb, ub;
  std::function<double(const Eigen::VectorXd&)> f;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> g;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> c;
  int m = 0;

  int dim() const override { return n; }
  int constraint_count() const override { return m; }
  Eigen::VectorXd lower_bounds() const override { return lb; }
  Eigen::VectorXd upper_bounds() const override { return ub; }
  double objective(const Eigen::VectorXd& x) const override { return f(x); }
  void objective_gradient(const Eigen::VectorXd& x, Eigen::VectorXd& grad) const override {
    grad = g(x);
  }
  Eigen::VectorXd residuals(const Eigen::VectorXd& x) const override { return c(x); }
  void add_residual_adjoint(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                            Eigen::VectorXd& grad) const override {
    const double step = 1e-7;
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd xp = x, xm = x;
      xp(i) += step;
      xm(i) -= step;
      grad(i) += y.dot((c(xp) - c(xm)) / (2.0 * step));
    }
  }
};

}  // namespace

TEST_CASE("equality-constrained quadratic reaches the analytic optimum") {
  // min 1/2 |x - a|^2  s.t.  x1 + x2 + x3 = 1  ->  x = a - ((sum a - 1)/3) e
  ToyProblem p;
  p.n = 3;
  p.m = 1;
  p.lb = Eigen::VectorXd::Constant(3, -10.0);
  p.ub = Eigen::VectorXd::Constant(3, 10.0);
  const Eigen::Vector3d a(2.0, -1.0, 0.5);
  p.f = [a](const Eigen::VectorXd& x) { return 0.5 * (x - a).squaredNorm(); };
  p.g = [a](const Eigen::VectorXd& x) { return Eigen::VectorXd(x - a); };
  p.c = [](const Eigen::VectorXd& x) {
    Eigen::VectorXd r(1);
    r(0) = x.sum() - 1.0;
    return r;
  };

  const SolverResult res = solve_constrained(p, Eigen::VectorXd::Zero(3));
  CHECK(res.converged);
  const Eigen::Vector3d expected = a - Eigen::Vector3d::Constant((a.sum() - 1.0) / 3.0);
  CHECK((res.x - expected).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(res.max_constraint_violation < 1e-6);
}

TEST_CASE("active bounds hold the solution on the box") {
  // min (x-2)^2 with x <= 1 and no equality constraints
  ToyProblem p;
  p.n = 1;
  p.m = 0;
  p.lb = Eigen::VectorXd::Constant(1, -1.0);
  p.ub = Eigen::VectorXd::Constant(1, 1.0);
  p.f = [](const Eigen::VectorXd& x) { return (x(0) - 2.0) * (x(0) - 2.0); };
  p.g = [](const Eigen::VectorXd& x) {
    Eigen::VectorXd grad(1);
    grad(0) = 2.0 * (x(0) - 2.0);
    return grad;
  };
  p.c = [](const Eigen::VectorXd&) { return Eigen::VectorXd(0); };

  const SolverResult res = solve_constrained(p, Eigen::VectorXd::Zero(1));
  CHECK(res.converged);
  CHECK(res.x(0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("nonlinear equality on the circle") {
  // min x1 + x2  s.t.  x1^2 + x2^2 = 1  ->  x = (-1/sqrt(2), -1/sqrt(2))
  ToyProblem p;
  p.n = 2;
  p.m = 1;
  p.lb = Eigen::VectorXd::Constant(2, -5.0);
  p.ub = Eigen::VectorXd::Constant(2, 5.0);
  p.f = [](const Eigen::VectorXd& x) { return x(0) + x(1); };
  p.g = [](const Eigen::VectorXd&) { return Eigen::VectorXd::Ones(2).eval(); };
  p.c = [](const Eigen::VectorXd& x) {
    Eigen::VectorXd r(1);
    r(0) = x.squaredNorm() - 1.0;
    return r;
  };

  Eigen::VectorXd x0(2);
  x0 << 0.3, -0.8;
  const SolverResult res = solve_constrained(p, x0);
  CHECK(res.converged);
  CHECK(res.x(0) == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-5));
  CHECK(res.x(1) == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-5));
}

TEST_CASE("infeasible problems report non-convergence") {
  // x = 0 and x = 1 cannot both hold
  ToyProblem p;
  p.n = 1;
  p.m = 2;
  p.lb = Eigen::VectorXd::Constant(1, -5.0);
  p.ub = Eigen::VectorXd::Constant(1, 5.0);
  p.f = [](const Eigen::VectorXd&) { return 0.0; };
  p.g = [](const Eigen::VectorXd&) { return Eigen::VectorXd::Zero(1).eval(); };
  p.c = [](const Eigen::VectorXd& x) {
    Eigen::VectorXd r(2);
    r(0) = x(0);
    r(1) = x(0) - 1.0;
    return r;
  };

  SolverOptions options;
  options.max_outer = 10;
  options.max_inner = 50;
  const SolverResult res = solve_constrained(p, Eigen::VectorXd::Zero(1), options);
  CHECK_FALSE(res.converged);
  CHECK(res.max_constraint_violation > 0.1);
}

TEST_CASE("the solver is deterministic") {
  ToyProblem p;
  p.n = 2;
  p.m = 1;
  p.lb = Eigen::VectorXd::Constant(2, -3.0);
  p.ub = Eigen::VectorXd::Constant(2, 3.0);
  p.f = [](const Eigen::VectorXd& x) {
    return std::pow(x(0) - 0.3, 4) + x(1) * x(1) + std::sin(x(0)) * 0.1;
  };
  p.g = [](const Eigen::VectorXd& x) {
    Eigen::VectorXd grad(2);
    grad(0) = 4.0 * std::pow(x(0) - 0.3, 3) + 0.1 * std::cos(x(0));
    grad(1) = 2.0 * x(1);
    return grad;
  };
  p.c = [](const Eigen::VectorXd& x) {
    Eigen::VectorXd r(1);
    r(0) = x(0) + 2.0 * x(1) - 0.5;
    return r;
  };

  Eigen::VectorXd x0(2);
  x0 << 1.0, -1.0;
  const SolverResult a = solve_constrained(p, x0);
  const SolverResult b = solve_constrained(p, x0);
  CHECK(a.x(0) == b.x(0));
  CHECK(a.x(1) == b.x(1));
  CHECK(a.inner_iterations == b.inner_iterations);
}
