#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "alcontact/contact_model.hpp"
#include "alcontact/headneck.hpp"
#include "alcontact/solver.hpp"
#include "alcontact/trajectory.hpp"

namespace alc {

struct Phase {
  double t_start = 0.0;
  double t_end = 0.0;
  double w_tau = 0.0;  // weight on actuation squared
  double w_kin = 0.0;  // weight on kinetic energy
};

/// Multiphase optimal-control task on a fixed uniform grid.
struct OcpSpec {
  double t0 = 0.0;
  double tF = 2.0;
  double step = 0.01;
  std::vector<Phase> phases;
  double tau_bound = 30.0;
  double q_lower = 0.02;
  double q_upper = 0.42;
  State initial_state{0.232, 0.0};
  bool terminal_rest = true;
  std::shared_ptr<const JointContactModel> contact;  // null = no contact

  int interval_count() const;
  const Phase& phase_for_interval(int k) const;

  /// Throws std::invalid_argument if the phases do not tile [t0, tF], a
  /// phase boundary is off-grid, or the horizon is not a multiple of step.
  void validate() const;
};

/// The paper task: 2 s horizon, phase change at 1 s, weights (1e-3, 1e-4)
/// then (1, 1), |tau| <= 30 Nm, start at rest at q = 0.232 rad, rest at the
/// end. Contact model left unset.
OcpSpec default_task();

struct SolveReport {
  bool converged = false;
  int iterations = 0;
  double max_constraint_violation = 0.0;
  double stationarity_norm = 0.0;
  double objective_value = 0.0;
};

/// Discrete-mechanics transcription: decision vector [q_0..q_N, tau_0..tau_{N-1}],
/// midpoint discrete Lagrangian, discrete Euler-Lagrange equalities, rest
/// boundary conditions through the discrete momenta.
class TranscribedOcp final : public ConstrainedProblem {
 public:
  TranscribedOcp(OcpSpec spec, ModelParams params);

  int dim() const override;
  int constraint_count() const override;
  Eigen::VectorXd lower_bounds() const override;
  Eigen::VectorXd upper_bounds() const override;
  double objective(const Eigen::VectorXd& x) const override;
  void objective_gradient(const Eigen::VectorXd& x, Eigen::VectorXd& grad) const override;
  Eigen::VectorXd residuals(const Eigen::VectorXd& x) const override;
  void add_residual_adjoint(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                            Eigen::VectorXd& grad) const override;
  void gauss_newton_hessian(const Eigen::VectorXd& x, double mu,
                            Eigen::MatrixXd& h) const override;

  /// Warm start when given and dimension-compatible, else a linear ramp from
  /// q_init to q_upper with zero actuation.
  Eigen::VectorXd initial_guess(const Trajectory* warm_start) const;

  /// Decision vector -> trajectory, node velocities via the discrete
  /// Legendre transform.
  Trajectory extract(const Eigen::VectorXd& x) const;

  const OcpSpec& spec() const { return spec_; }
  const ModelParams& params() const { return params_; }

 private:
  struct IntervalData;
  void interval_data(const Eigen::VectorXd& x, bool with_gradients,
                     std::vector<IntervalData>& out) const;

  OcpSpec spec_;
  ModelParams params_;
  int n_intervals_;
  double inertia_;
};

TranscribedOcp transcribe(const OcpSpec& spec, const ModelParams& params);

std::pair<Trajectory, SolveReport> solve(const TranscribedOcp& ocp,
                                         const Trajectory* warm_start = nullptr,
                                         const SolverOptions& options = {});

}  // namespace alc
