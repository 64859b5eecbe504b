#include "alcontact/headneck.hpp"

#include <cmath>
#include <stdexcept>

namespace alc {

double ModelParams::default_plane_offset(double cog_offset, double head_radius) {
  return cog_offset * std::sin(0.30) + head_radius;
}

Frame ModelParams::default_headrest(double cog_offset, double head_radius) {
  Frame frame;
  frame.origin = Eigen::Vector3d(default_plane_offset(cog_offset, head_radius), 0.0,
                                 cog_offset * std::cos(0.30));
  return frame;
}

void ModelParams::validate() const {
  if (!(head_mass > 0.0) || !(cog_inertia > 0.0) || !(cog_offset > 0.0) ||
      !(head_radius > 0.0) || !(gravity > 0.0) || !(tau_max > 0.0)) {
    throw std::invalid_argument("model params: masses, lengths, gravity and "
                                "torque bound must be positive");
  }
  if (!(q_min < q_max)) {
    throw std::invalid_argument("model params: q_min must be below q_max");
  }
  if (!(q_min > 0.0)) {
    throw std::invalid_argument("model params: q_min must exclude the upright "
                                "configuration (q_min > 0)");
  }
  if (std::abs(joint_axis.norm() - 1.0) > 1e-9) {
    throw std::invalid_argument("model params: joint_axis must be a unit vector");
  }
  headrest.validate();
}

HeadPose head_frame(double q, const ModelParams& params) {
  if (!std::isfinite(q)) {
    throw std::invalid_argument("head_frame: q must be finite");
  }
  const double l = params.cog_offset;
  HeadPose pose;
  pose.frame.origin = Eigen::Vector3d(l * std::sin(q), 0.0, l * std::cos(q));
  pose.frame.rotation = rotation_about(params.joint_axis, q);
  pose.lin_jac = Eigen::Vector3d(l * std::cos(q), 0.0, -l * std::sin(q));
  pose.ang_jac = params.joint_axis;
  return pose;
}

double gravity_torque(double q, const ModelParams& params) {
  return params.head_mass * params.gravity * params.cog_offset * std::sin(q);
}

double project_contact_wrench(double q, const Wrench& wrench,
                              const ModelParams& params) {
  if (wrench.frame != WrenchFrame::headrest) {
    throw std::invalid_argument("project_contact_wrench: wrench must be given "
                                "in the headrest frame");
  }
  const HeadPose pose = head_frame(q, params);
  const Eigen::Matrix3d& r_hr = params.headrest.rotation;
  return pose.lin_jac.dot(r_hr * wrench.force) + pose.ang_jac.dot(r_hr * wrench.moment);
}

double forward_dynamics(const State& state, double tau, double f_cm,
                        const ModelParams& params) {
  return (tau + gravity_torque(state.q, params) + f_cm) / params.total_inertia();
}

RelativeKinematics state_relative_kinematics(double q, double qdot,
                                             const ModelParams& params) {
  const HeadPose pose = head_frame(q, params);
  return relative_kinematics(pose.frame, pose.twist(qdot), params.headrest, Twist{});
}

Eigen::Matrix<double, 12, 2> state_kinematics_jacobian(double q, double qdot,
                                                       const ModelParams& params) {
  const double l = params.cog_offset;
  const Eigen::Matrix3d hr_t = params.headrest.rotation.transpose();
  const Eigen::Vector3d lin_jac(l * std::cos(q), 0.0, -l * std::sin(q));
  const Eigen::Vector3d lin_jac_dq(-l * std::sin(q), 0.0, -l * std::cos(q));
  const Eigen::Vector3d axis_hr = hr_t * params.joint_axis;

  Eigen::Matrix<double, 12, 2> jac = Eigen::Matrix<double, 12, 2>::Zero();
  jac.block<3, 1>(0, 0) = hr_t * lin_jac;            // d r_rel / dq
  jac.block<3, 1>(3, 0) = qdot * (hr_t * lin_jac_dq);  // d v_rel / dq
  jac.block<3, 1>(3, 1) = hr_t * lin_jac;            // d v_rel / dqdot
  jac.block<3, 1>(6, 1) = axis_hr;                   // d omega_rel / dqdot
  jac.block<3, 1>(9, 0) = axis_hr;                   // d theta / dq
  return jac;
}

Eigen::Matrix<double, kFeatureCount, 2> feature_state_jacobian(
    double q, double qdot, const ModelParams& params) {
  const RelativeKinematics rk = state_relative_kinematics(q, qdot, params);
  return feature_jacobian(rk) * state_kinematics_jacobian(q, qdot, params);
}

}  // namespace alc
