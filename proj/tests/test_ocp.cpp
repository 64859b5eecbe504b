#include <doctest.h>

#include <cmath>
#include <memory>

#include "alcontact/contact_model.hpp"
#include "alcontact/ocp.hpp"
#include "alcontact/rng.hpp"

using namespace alc;

namespace {

OcpSpec static_task() {
  OcpSpec spec = default_task();
  spec.initial_state.q = spec.q_lower;  // holding at q_min is the optimum
  return spec;
}

MlpModel small_random_net(const std::vector<int>& dims, std::uint64_t seed) {
  MlpModel model = MlpModel::zeros(dims);
  Rng rng(seed);
  model.init_weights(rng);
  for (Eigen::Index i = 0; i < model.norm_std.size(); ++i) {
    model.norm_std(i) = 0.5 + 0.1 * static_cast<double>(i % 3);
  }
  return model;
}

}  // namespace

TEST_CASE("spec validation") {
  OcpSpec spec = default_task();
  CHECK_NOTHROW(spec.validate());
  CHECK(spec.interval_count() == 200);

  SUBCASE("gap between phases") {
    spec.phases[1].t_start = 1.1;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  }
  SUBCASE("off-grid phase boundary") {
    spec.phases[0].t_end = 1.0042;
    spec.phases[1].t_start = 1.0042;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  }
  SUBCASE("horizon not a multiple of the step") {
    spec.step = 0.03;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  }
}

TEST_CASE("default task encodes the reference protocol") {
  const OcpSpec spec = default_task();
  CHECK(spec.t0 == 0.0);
  CHECK(spec.tF == 2.0);
  REQUIRE(spec.phases.size() == 2);
  CHECK(spec.phases[0].t_start == 0.0);
  CHECK(spec.phases[0].t_end == 1.0);
  CHECK(spec.phases[0].w_tau == 1e-3);
  CHECK(spec.phases[0].w_kin == 1e-4);
  CHECK(spec.phases[1].t_start == 1.0);
  CHECK(spec.phases[1].t_end == 2.0);
  CHECK(spec.phases[1].w_tau == 1.0);
  CHECK(spec.phases[1].w_kin == 1.0);
  CHECK(spec.tau_bound == 30.0);
  CHECK(spec.initial_state.q == 0.232);
  CHECK(spec.initial_state.qdot == 0.0);
  CHECK(spec.terminal_rest);
}

TEST_CASE("decision dimension is 2N + 1") {
  const TranscribedOcp ocp(default_task(), ModelParams{});
  CHECK(ocp.dim() == 401);
  CHECK(ocp.constraint_count() == 202);
}

TEST_CASE("phase weight lookup puts the boundary node in the later phase") {
  const OcpSpec spec = default_task();
  CHECK(spec.phase_for_interval(99).w_tau == 1e-3);
  CHECK(spec.phase_for_interval(100).w_tau == 1.0);
  CHECK(spec.phase_for_interval(199).w_kin == 1.0);
  CHECK(spec.phase_for_interval(0).w_kin == 1e-4);
}

TEST_CASE("static balance satisfies every equality residual") {
  const ModelParams params;
  const OcpSpec spec = static_task();
  const TranscribedOcp ocp(spec, params);

  const int n = spec.interval_count();
  Eigen::VectorXd x(ocp.dim());
  const double tau = -params.head_mass * params.gravity * params.cog_offset *
                     std::sin(spec.initial_state.q);
  x.head(n + 1).setConstant(spec.initial_state.q);
  x.tail(n).setConstant(tau);

  const Eigen::VectorXd c = ocp.residuals(x);
  CHECK(c.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("force-free steps conserve discrete momentum") {
  ModelParams params;
  params.gravity = 1e-30;  // validation requires positive gravity
  OcpSpec spec = default_task();
  spec.t0 = 0.0;
  spec.tF = 0.1;
  spec.step = 0.01;  // N = 10
  spec.phases = {Phase{0.0, 0.1, 1.0, 1.0}};
  spec.q_lower = -10.0;
  spec.q_upper = 10.0;
  spec.initial_state.q = 0.0;
  const TranscribedOcp ocp(spec, params);

  const int n = 10;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(ocp.dim());
  const double v = 0.7;
  for (int k = 0; k <= n; ++k) x(k) = spec.initial_state.q + v * k * spec.step;

  const Eigen::VectorXd c = ocp.residuals(x);
  // interior rows vanish for any constant-velocity trajectory
  for (int k = 1; k <= n - 1; ++k) {
    CHECK(std::abs(c(1 + k)) < 1e-12);
  }
  // a velocity kink breaks an interior residual
  Eigen::VectorXd kinked = x;
  kinked(5) += 0.01;
  const Eigen::VectorXd ck = ocp.residuals(kinked);
  CHECK(ck.segment(2, n - 1).cwiseAbs().maxCoeff() > 1e-3);
}

TEST_CASE("objective value and gradient") {
  const ModelParams params;
  const OcpSpec spec = default_task();
  const TranscribedOcp ocp(spec, params);
  const int n = spec.interval_count();

  SUBCASE("constant trajectory costs only actuation") {
    Eigen::VectorXd x(ocp.dim());
    x.head(n + 1).setConstant(0.3);
    x.tail(n).setConstant(2.0);
    // 100 intervals at w_tau 1e-3 plus 100 at w_tau 1, each h * tau^2
    const double expected = 100 * 0.01 * (1e-3 * 4.0) + 100 * 0.01 * (1.0 * 4.0);
    CHECK(ocp.objective(x) == doctest::Approx(expected).epsilon(1e-12));
  }

  SUBCASE("gradient matches central finite differences") {
    Rng rng(2025);
    Eigen::VectorXd x(ocp.dim());
    for (int k = 0; k <= n; ++k) x(k) = rng.uniform(0.05, 0.4);
    for (int k = 0; k < n; ++k) x(n + 1 + k) = rng.uniform(-5.0, 5.0);

    Eigen::VectorXd grad(ocp.dim());
    ocp.objective_gradient(x, grad);
    const double step = 1e-6;
    for (int i = 0; i < ocp.dim(); i += 7) {
      Eigen::VectorXd xp = x, xm = x;
      xp(i) += step;
      xm(i) -= step;
      const double fd = (ocp.objective(xp) - ocp.objective(xm)) / (2.0 * step);
      CHECK(std::abs(grad(i) - fd) / std::max(1.0, std::abs(fd)) < 1e-5);
    }
  }
}

TEST_CASE("residual adjoint matches finite differences through the surrogate") {
  ModelParams params;
  const auto contact = std::make_shared<SurrogateContact>(
      small_random_net({19, 6, 6, 4, 3}, 11), small_random_net({19, 6, 6, 6, 4, 3}, 12),
      params);
  OcpSpec spec = default_task();
  spec.tF = 0.2;  // keep the FD sweep cheap: N = 20
  spec.phases = {Phase{0.0, 0.2, 1e-3, 1e-4}};
  spec.contact = contact;
  const TranscribedOcp ocp(spec, params);
  const int n = spec.interval_count();

  Rng rng(77);
  Eigen::VectorXd x(ocp.dim());
  for (int k = 0; k <= n; ++k) x(k) = rng.uniform(0.05, 0.4);
  for (int k = 0; k < n; ++k) x(n + 1 + k) = rng.uniform(-5.0, 5.0);
  Eigen::VectorXd y(ocp.constraint_count());
  for (int r = 0; r < y.size(); ++r) y(r) = rng.uniform(-1.0, 1.0);

  Eigen::VectorXd grad = Eigen::VectorXd::Zero(ocp.dim());
  ocp.add_residual_adjoint(x, y, grad);

  const double step = 1e-6;
  for (int i = 0; i < ocp.dim(); ++i) {
    Eigen::VectorXd xp = x, xm = x;
    xp(i) += step;
    xm(i) -= step;
    const double fd = (y.dot(ocp.residuals(xp)) - y.dot(ocp.residuals(xm))) /
                      (2.0 * step);
    CHECK(std::abs(grad(i) - fd) / std::max(1.0, std::abs(fd)) < 1e-5);
  }
}

TEST_CASE("static task solves to the analytic solution from a cold start") {
  const ModelParams params;
  const OcpSpec spec = static_task();
  const TranscribedOcp ocp(spec, params);

  const auto [traj, report] = solve(ocp);
  CHECK(report.converged);
  CHECK(report.max_constraint_violation < 1e-6);

  const double tau_expected = -params.head_mass * params.gravity * params.cog_offset *
                              std::sin(spec.initial_state.q);
  for (double q : traj.q) CHECK(std::abs(q - spec.initial_state.q) < 1e-6);
  for (double tau : traj.tau) CHECK(std::abs(tau - tau_expected) < 1e-6);
  for (double qdot : traj.qdot) CHECK(std::abs(qdot) < 1e-6);
}

TEST_CASE("returned torques respect the bounds exactly") {
  const ModelParams params;
  OcpSpec spec = default_task();
  spec.tau_bound = 3.0;  // tight bound forces saturation somewhere
  const TranscribedOcp ocp(spec, params);
  const auto [traj, report] = solve(ocp);
  for (double tau : traj.tau) {
    CHECK(tau <= 3.0);
    CHECK(tau >= -3.0);
  }
  for (double q : traj.q) {
    CHECK(q <= spec.q_upper);
    CHECK(q >= spec.q_lower);
  }
}

TEST_CASE("infeasible initial state is reported, not hidden") {
  const ModelParams params;
  OcpSpec spec = default_task();
  spec.initial_state.q = 0.6;  // outside [0.02, 0.42]
  const TranscribedOcp ocp(spec, params);
  SolverOptions options;
  options.max_outer = 8;
  options.max_inner = 60;
  const auto [traj, report] = solve(ocp, nullptr, options);
  CHECK_FALSE(report.converged);
  CHECK(report.max_constraint_violation > 0.1);
}

TEST_CASE("solving is deterministic") {
  const ModelParams params;
  const TranscribedOcp ocp(static_task(), params);
  const auto [ta, ra] = solve(ocp);
  const auto [tb, rb] = solve(ocp);
  CHECK(ra.iterations == rb.iterations);
  for (std::size_t k = 0; k < ta.q.size(); ++k) CHECK(ta.q[k] == tb.q[k]);
  for (std::size_t k = 0; k < ta.tau.size(); ++k) CHECK(ta.tau[k] == tb.tau[k]);
}

TEST_CASE("warm starts must match dimensions to be used") {
  const ModelParams params;
  const TranscribedOcp ocp(static_task(), params);
  Trajectory bogus;
  bogus.times = {0.0, 0.5};
  bogus.q = {0.1, 0.1};
  bogus.qdot = {0.0, 0.0};
  bogus.tau = {0.0};
  const Eigen::VectorXd x0 = ocp.initial_guess(&bogus);
  // falls back to the ramp: endpoint at the upper bound
  CHECK(x0(200) == doctest::Approx(0.42));
  CHECK(x0(0) == doctest::Approx(0.02));
}

TEST_CASE("discrete Euler-Lagrange residuals vanish at a converged solution") {
  // independent re-evaluation of the optimality system's equalities
  const ModelParams params;
  const OcpSpec spec = static_task();
  const TranscribedOcp ocp(spec, params);
  const auto [traj, report] = solve(ocp);
  REQUIRE(report.converged);

  const int n = spec.interval_count();
  Eigen::VectorXd x(ocp.dim());
  for (int k = 0; k <= n; ++k) x(k) = traj.q[k];
  for (int k = 0; k < n; ++k) x(n + 1 + k) = traj.tau[k];
  const Eigen::VectorXd c = ocp.residuals(x);
  CHECK(c.cwiseAbs().maxCoeff() < 1e-6);
}
