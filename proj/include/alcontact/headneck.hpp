#pragma once

#include <Eigen/Dense>

#include "alcontact/kinematics.hpp"

namespace alc {

enum class WrenchFrame { headrest, world };

/// Force and moment acting on the head, moment taken about the head COG.
struct Wrench {
  Eigen::Vector3d force = Eigen::Vector3d::Zero();
  Eigen::Vector3d moment = Eigen::Vector3d::Zero();
  WrenchFrame frame = WrenchFrame::headrest;
};

struct State {
  double q = 0.0;
  double qdot = 0.0;
};

/// Parameters of the 1-DOF head-neck model. q = 0 puts the head COG
/// vertically above the joint; positive q tilts toward the headrest (+x).
struct ModelParams {
  double head_mass = 4.5;       // [kg]
  double cog_inertia = 0.02;    // [kg m^2] about the COG, y-axis
  double cog_offset = 0.15;     // [m] joint-to-COG distance
  double head_radius = 0.09;    // [m] contact sphere about the COG
  Eigen::Vector3d joint_axis = Eigen::Vector3d::UnitY();
  double gravity = 9.81;        // [m/s^2]
  double q_min = 0.02;          // [rad]
  double q_max = 0.42;          // [rad]
  double tau_max = 30.0;        // [Nm]
  double plane_offset = default_plane_offset(0.15, 0.09);  // [m] headrest plane x
  Frame headrest = default_headrest(0.15, 0.09);

  /// Joint-space inertia I_c + m L^2 (parallel axis).
  double total_inertia() const { return cog_inertia + head_mass * cog_offset * cog_offset; }

  /// First contact of the default geometry occurs at q = 0.30 rad.
  static double default_plane_offset(double cog_offset, double head_radius);
  static Frame default_headrest(double cog_offset, double head_radius);

  /// Throws std::invalid_argument on nonpositive masses/lengths or an
  /// empty joint range.
  void validate() const;
};

/// Head frame at joint angle q plus the velocity Jacobians (twist per unit
/// qdot): linear lin_jac [m] and angular ang_jac [rad].
struct HeadPose {
  Frame frame;
  Eigen::Vector3d lin_jac = Eigen::Vector3d::Zero();
  Eigen::Vector3d ang_jac = Eigen::Vector3d::Zero();

  Twist twist(double qdot) const { return Twist{qdot * lin_jac, qdot * ang_jac}; }
};

HeadPose head_frame(double q, const ModelParams& params);

/// Generalized gravity torque m g L sin(q); positive toward the headrest.
double gravity_torque(double q, const ModelParams& params);

/// Generalized contact force J_v^T (R_hr F) + J_w^T (R_hr M), wrench given in
/// the headrest frame with F at the COG and M about the COG.
/// Throws std::invalid_argument if the wrench frame is not headrest.
double project_contact_wrench(double q, const Wrench& wrench, const ModelParams& params);

/// qddot = (tau + gravity_torque(q) + f_cm) / I_tot.
double forward_dynamics(const State& state, double tau, double f_cm,
                        const ModelParams& params);

/// Relative kinematics of the head w.r.t. the (fixed) headrest at (q, qdot).
RelativeKinematics state_relative_kinematics(double q, double qdot,
                                             const ModelParams& params);

/// d[r_rel, v_rel, omega_rel, theta]/d[q, qdot]; composes with
/// feature_jacobian to give d(features)/d(q, qdot).
Eigen::Matrix<double, 12, 2> state_kinematics_jacobian(double q, double qdot,
                                                       const ModelParams& params);

/// d(features)/d[q, qdot] for the 1-DOF kinematic chain.
Eigen::Matrix<double, kFeatureCount, 2> feature_state_jacobian(
    double q, double qdot, const ModelParams& params);

}  // namespace alc
