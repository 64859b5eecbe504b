#include "alcontact/ocp.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace alc {

namespace {
constexpr double kGridTol = 1e-9;
}

int OcpSpec::interval_count() const {
  return static_cast<int>(std::llround((tF - t0) / step));
}

const Phase& OcpSpec::phase_for_interval(int k) const {
  const double t = t0 + k * step;
  for (const Phase& phase : phases) {
    if (t >= phase.t_start - kGridTol && t < phase.t_end - kGridTol) return phase;
  }
  throw std::logic_error("phase lookup failed; spec not validated?");
}

void OcpSpec::validate() const {
  if (!(step > 0.0) || !(tF > t0)) {
    throw std::invalid_argument("ocp spec: need tF > t0 and step > 0");
  }
  const double n_real = (tF - t0) / step;
  if (std::abs(n_real - std::llround(n_real)) > kGridTol) {
    throw std::invalid_argument("ocp spec: horizon must be a multiple of step");
  }
  if (phases.empty()) {
    throw std::invalid_argument("ocp spec: need at least one phase");
  }
  double cursor = t0;
  for (const Phase& phase : phases) {
    if (std::abs(phase.t_start - cursor) > kGridTol) {
      throw std::invalid_argument("ocp spec: phases must tile the horizon "
                                  "without gaps or overlaps");
    }
    if (!(phase.t_end > phase.t_start)) {
      throw std::invalid_argument("ocp spec: empty phase");
    }
    const double offset = (phase.t_start - t0) / step;
    if (std::abs(offset - std::llround(offset)) > kGridTol) {
      throw std::invalid_argument("ocp spec: phase boundary off the time grid");
    }
    if (phase.w_tau < 0.0 || phase.w_kin < 0.0) {
      throw std::invalid_argument("ocp spec: phase weights must be nonnegative");
    }
    cursor = phase.t_end;
  }
  if (std::abs(cursor - tF) > kGridTol) {
    throw std::invalid_argument("ocp spec: phases must end at tF");
  }
  if (!(tau_bound > 0.0) || !(q_lower < q_upper)) {
    throw std::invalid_argument("ocp spec: invalid bounds");
  }
}

OcpSpec default_task() {
  OcpSpec spec;
  spec.t0 = 0.0;
  spec.tF = 2.0;
  spec.step = 0.01;
  spec.phases = {Phase{0.0, 1.0, 1e-3, 1e-4}, Phase{1.0, 2.0, 1.0, 1.0}};
  spec.tau_bound = 30.0;
  spec.q_lower = 0.02;
  spec.q_upper = 0.42;
  spec.initial_state = State{0.232, 0.0};
  spec.terminal_rest = true;
  return spec;
}

struct TranscribedOcp::IntervalData {
  double v = 0.0;        // (q_{k+1} - q_k) / h
  double gravity = 0.0;  // m g L sin(qbar)
  double gravity_dq = 0.0;
  double fcm = 0.0;
  double fcm_dq = 0.0;   // at the midpoint state
  double fcm_dv = 0.0;
};

TranscribedOcp::TranscribedOcp(OcpSpec spec, ModelParams params)
    : spec_(std::move(spec)), params_(std::move(params)) {
  spec_.validate();
  params_.validate();
  n_intervals_ = spec_.interval_count();
  inertia_ = params_.total_inertia();
}

int TranscribedOcp::dim() const { return 2 * n_intervals_ + 1; }

int TranscribedOcp::constraint_count() const {
  return n_intervals_ + (spec_.terminal_rest ? 2 : 1);
}

Eigen::VectorXd TranscribedOcp::lower_bounds() const {
  Eigen::VectorXd lb(dim());
  lb.head(n_intervals_ + 1).setConstant(spec_.q_lower);
  lb.tail(n_intervals_).setConstant(-spec_.tau_bound);
  return lb;
}

Eigen::VectorXd TranscribedOcp::upper_bounds() const {
  Eigen::VectorXd ub(dim());
  ub.head(n_intervals_ + 1).setConstant(spec_.q_upper);
  ub.tail(n_intervals_).setConstant(spec_.tau_bound);
  return ub;
}

void TranscribedOcp::interval_data(const Eigen::VectorXd& x, bool with_gradients,
                                   std::vector<IntervalData>& out) const {
  const int n = n_intervals_;
  const double h = spec_.step;
  const double mgl = params_.head_mass * params_.gravity * params_.cog_offset;
  out.resize(n);
  for (int k = 0; k < n; ++k) {
    IntervalData& d = out[k];
    const double qk = x(k);
    const double qk1 = x(k + 1);
    const double qbar = 0.5 * (qk + qk1);
    d.v = (qk1 - qk) / h;
    d.gravity = mgl * std::sin(qbar);
    d.gravity_dq = mgl * std::cos(qbar);
    if (spec_.contact) {
      d.fcm = spec_.contact->generalized_force(qbar, d.v);
      if (with_gradients) {
        const Eigen::Vector2d g = spec_.contact->generalized_force_gradient(qbar, d.v);
        d.fcm_dq = g(0);
        d.fcm_dv = g(1);
      }
    }
  }
}

double TranscribedOcp::objective(const Eigen::VectorXd& x) const {
  const int n = n_intervals_;
  const double h = spec_.step;
  double total = 0.0;
  for (int k = 0; k < n; ++k) {
    const Phase& phase = spec_.phase_for_interval(k);
    const double tau = x(n + 1 + k);
    const double v = (x(k + 1) - x(k)) / h;
    total += h * (phase.w_tau * tau * tau + phase.w_kin * 0.5 * inertia_ * v * v);
  }
  return total;
}

void TranscribedOcp::objective_gradient(const Eigen::VectorXd& x,
                                        Eigen::VectorXd& grad) const {
  const int n = n_intervals_;
  const double h = spec_.step;
  grad.setZero(dim());
  for (int k = 0; k < n; ++k) {
    const Phase& phase = spec_.phase_for_interval(k);
    const double tau = x(n + 1 + k);
    const double v = (x(k + 1) - x(k)) / h;
    grad(n + 1 + k) += 2.0 * h * phase.w_tau * tau;
    const double dv = phase.w_kin * inertia_ * v;  // d/dv of h * w * I v^2 / 2 / h
    grad(k) -= dv;
    grad(k + 1) += dv;
  }
}

Eigen::VectorXd TranscribedOcp::residuals(const Eigen::VectorXd& x) const {
  const int n = n_intervals_;
  const double h = spec_.step;
  std::vector<IntervalData> data;
  interval_data(x, false, data);

  Eigen::VectorXd c(constraint_count());
  c(0) = x(0) - spec_.initial_state.q;

  const auto total_force = [&](int k) {
    return data[k].gravity + x(n + 1 + k) + data[k].fcm;
  };

  // momentum at the start: I v_0 - (h/2) G_0
  c(1) = inertia_ * data[0].v - 0.5 * h * total_force(0);
  // interior discrete Euler-Lagrange, scaled 1/h to torque units
  for (int k = 1; k <= n - 1; ++k) {
    c(1 + k) = inertia_ * (data[k - 1].v - data[k].v) / h +
               0.5 * (total_force(k - 1) + total_force(k));
  }
  if (spec_.terminal_rest) {
    c(n + 1) = inertia_ * data[n - 1].v + 0.5 * h * total_force(n - 1);
  }
  return c;
}

void TranscribedOcp::add_residual_adjoint(const Eigen::VectorXd& x,
                                          const Eigen::VectorXd& y,
                                          Eigen::VectorXd& grad) const {
  const int n = n_intervals_;
  const double h = spec_.step;
  std::vector<IntervalData> data;
  interval_data(x, true, data);

  grad(0) += y(0);

  for (int k = 0; k < n; ++k) {
    // interval k appears in rows 1+k (left slot) and 2+k (right slot)
    const double y_left = y(1 + k);
    const bool has_right = (k < n - 1) || spec_.terminal_rest;
    const double y_right = has_right ? y(2 + k) : 0.0;

    const double c_mom_left = (k == 0) ? 1.0 : -1.0 / h;
    const double c_force_left = (k == 0) ? -0.5 * h : 0.5;
    const double c_mom_right = (k == n - 1) ? 1.0 : 1.0 / h;
    const double c_force_right = (k == n - 1) ? 0.5 * h : 0.5;

    const double w_mom = c_mom_left * y_left + (has_right ? c_mom_right * y_right : 0.0);
    const double w_force = c_force_left * y_left + (has_right ? c_force_right * y_right : 0.0);

    const IntervalData& d = data[k];
    const double dq_mid = 0.5 * (d.gravity_dq + d.fcm_dq);
    grad(k) += w_mom * (-inertia_ / h) + w_force * (dq_mid - d.fcm_dv / h);
    grad(k + 1) += w_mom * (inertia_ / h) + w_force * (dq_mid + d.fcm_dv / h);
    grad(n + 1 + k) += w_force;
  }
}

void TranscribedOcp::gauss_newton_hessian(const Eigen::VectorXd& x, double mu,
                                          Eigen::MatrixXd& h) const {
  const int n = n_intervals_;
  const double step = spec_.step;
  h.setZero(dim(), dim());

  // exact objective curvature: tau diagonal plus tridiagonal kinetic block
  for (int k = 0; k < n; ++k) {
    const Phase& phase = spec_.phase_for_interval(k);
    h(n + 1 + k, n + 1 + k) += 2.0 * step * phase.w_tau;
    const double wq = phase.w_kin * inertia_ / step;
    h(k, k) += wq;
    h(k + 1, k + 1) += wq;
    h(k, k + 1) -= wq;
    h(k + 1, k) -= wq;
  }

  // mu J^T J accumulated from the banded row stencils of the residuals
  std::vector<IntervalData> data;
  interval_data(x, true, data);

  struct Entry {
    int col;
    double val;
  };
  const int m = constraint_count();
  std::vector<std::array<Entry, 5>> stencils(m);
  std::vector<int> counts(m, 0);
  const auto add = [&stencils, &counts](int row, int col, double val) {
    for (int i = 0; i < counts[row]; ++i) {
      if (stencils[row][i].col == col) {
        stencils[row][i].val += val;
        return;
      }
    }
    stencils[row][counts[row]++] = Entry{col, val};
  };

  add(0, 0, 1.0);
  for (int k = 0; k < n; ++k) {
    const IntervalData& d = data[k];
    const double dq_mid = 0.5 * (d.gravity_dq + d.fcm_dq);
    const double c_mom_left = (k == 0) ? 1.0 : -1.0 / step;
    const double c_force_left = (k == 0) ? -0.5 * step : 0.5;
    add(1 + k, k, c_mom_left * (-inertia_ / step) +
                      c_force_left * (dq_mid - d.fcm_dv / step));
    add(1 + k, k + 1, c_mom_left * (inertia_ / step) +
                          c_force_left * (dq_mid + d.fcm_dv / step));
    add(1 + k, n + 1 + k, c_force_left);
    if (k < n - 1 || spec_.terminal_rest) {
      const double c_mom_right = (k == n - 1) ? 1.0 : 1.0 / step;
      const double c_force_right = (k == n - 1) ? 0.5 * step : 0.5;
      add(2 + k, k, c_mom_right * (-inertia_ / step) +
                        c_force_right * (dq_mid - d.fcm_dv / step));
      add(2 + k, k + 1, c_mom_right * (inertia_ / step) +
                            c_force_right * (dq_mid + d.fcm_dv / step));
      add(2 + k, n + 1 + k, c_force_right);
    }
  }
  for (int r = 0; r < m; ++r) {
    for (int a = 0; a < counts[r]; ++a) {
      for (int b = 0; b < counts[r]; ++b) {
        h(stencils[r][a].col, stencils[r][b].col) +=
            mu * stencils[r][a].val * stencils[r][b].val;
      }
    }
  }
}

Eigen::VectorXd TranscribedOcp::initial_guess(const Trajectory* warm_start) const {
  const int n = n_intervals_;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(dim());
  if (warm_start != nullptr &&
      warm_start->times.size() == static_cast<std::size_t>(n + 1) &&
      warm_start->tau.size() == static_cast<std::size_t>(n)) {
    for (int k = 0; k <= n; ++k) x(k) = warm_start->q[k];
    for (int k = 0; k < n; ++k) x(n + 1 + k) = warm_start->tau[k];
    return x;
  }
  for (int k = 0; k <= n; ++k) {
    const double a = static_cast<double>(k) / n;
    x(k) = (1.0 - a) * spec_.initial_state.q + a * spec_.q_upper;
  }
  return x;
}

Trajectory TranscribedOcp::extract(const Eigen::VectorXd& x) const {
  const int n = n_intervals_;
  const double h = spec_.step;
  std::vector<IntervalData> data;
  interval_data(x, false, data);

  const auto total_force = [&](int k) {
    return data[k].gravity + x(n + 1 + k) + data[k].fcm;
  };

  Trajectory traj;
  traj.times.resize(n + 1);
  traj.q.resize(n + 1);
  traj.qdot.resize(n + 1);
  traj.tau.resize(n);
  for (int k = 0; k <= n; ++k) {
    traj.times[k] = spec_.t0 + k * h;
    traj.q[k] = x(k);
  }
  for (int k = 0; k < n; ++k) traj.tau[k] = x(n + 1 + k);
  // discrete Legendre transforms: p_0^- at the first node, p_k^+ elsewhere
  traj.qdot[0] = (inertia_ * data[0].v - 0.5 * h * total_force(0)) / inertia_;
  for (int k = 1; k <= n; ++k) {
    traj.qdot[k] =
        (inertia_ * data[k - 1].v + 0.5 * h * total_force(k - 1)) / inertia_;
  }
  return traj;
}

TranscribedOcp transcribe(const OcpSpec& spec, const ModelParams& params) {
  return TranscribedOcp(spec, params);
}

std::pair<Trajectory, SolveReport> solve(const TranscribedOcp& ocp,
                                         const Trajectory* warm_start,
                                         const SolverOptions& options) {
  const Eigen::VectorXd x0 = ocp.initial_guess(warm_start);
  const SolverResult res = solve_constrained(ocp, x0, options);

  SolveReport report;
  report.converged = res.converged;
  report.iterations = res.inner_iterations;
  report.max_constraint_violation = res.max_constraint_violation;
  report.stationarity_norm = res.stationarity;
  report.objective_value = res.objective;
  return {ocp.extract(res.x), report};
}

}  // namespace alc
