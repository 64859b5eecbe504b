#include "alcontact/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace alc {

void Frame::validate() const {
  const Eigen::Matrix3d gram = rotation.transpose() * rotation;
  const double ortho_err = (gram - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  const double det_err = std::abs(rotation.determinant() - 1.0);
  if (ortho_err > 1e-12 || det_err > 1e-12) {
    throw std::invalid_argument("invalid frame: rotation not orthonormal");
  }
  if (!origin.allFinite() || !rotation.allFinite()) {
    throw std::invalid_argument("invalid frame: non-finite entries");
  }
}

Eigen::Matrix3d rotation_about(const Eigen::Vector3d& unit_axis, double angle) {
  return Eigen::AngleAxisd(angle, unit_axis).toRotationMatrix();
}

Eigen::Matrix3d skew(const Eigen::Vector3d& a) {
  Eigen::Matrix3d m;
  m << 0.0, -a.z(), a.y(),
       a.z(), 0.0, -a.x(),
      -a.y(), a.x(), 0.0;
  return m;
}

RelativeKinematics relative_kinematics(const Frame& head, const Twist& head_twist,
                                       const Frame& headrest,
                                       const Twist& headrest_twist) {
  head.validate();
  headrest.validate();
  const Eigen::Matrix3d hr_t = headrest.rotation.transpose();
  const Eigen::Vector3d dp = head.origin - headrest.origin;

  RelativeKinematics rk;
  rk.r_rel = hr_t * dp;
  rk.v_rel = hr_t * (head_twist.v - headrest_twist.v - headrest_twist.omega.cross(dp));
  rk.T_rel = hr_t * head.rotation;
  rk.omega_rel = hr_t * (head_twist.omega - headrest_twist.omega);
  return rk;
}

double relative_angle(const Eigen::Matrix3d& t_rel) {
  const double arg = std::clamp((t_rel.trace() - 1.0) / 2.0, -1.0, 1.0);
  return std::acos(arg);
}

Eigen::Vector3d rotation_vector(const Eigen::Matrix3d& rotation) {
  const double angle = relative_angle(rotation);
  // axial part of (R - R^T)/2 equals sin(angle) * axis
  const Eigen::Vector3d axial(0.5 * (rotation(2, 1) - rotation(1, 2)),
                              0.5 * (rotation(0, 2) - rotation(2, 0)),
                              0.5 * (rotation(1, 0) - rotation(0, 1)));
  if (angle < 1e-7) {
    // axial = angle*axis*(1 - angle^2/6 + ...); first-order is exact enough here
    return axial;
  }
  const double s = std::sin(angle);
  if (s > 1e-6) {
    return (angle / s) * axial;
  }
  // angle near pi: axis from the dominant column of R + I
  Eigen::Matrix3d m = rotation + Eigen::Matrix3d::Identity();
  int col = 0;
  m.colwise().norm().maxCoeff(&col);
  Eigen::Vector3d axis = m.col(col).normalized();
  // fix the sign so axis agrees with the axial part
  if (axial.dot(axis) < 0.0) axis = -axis;
  return angle * axis;
}

FeatureVector encode_features(const RelativeKinematics& rk) {
  FeatureVector f;
  f.segment<3>(0) = rk.r_rel;
  f.segment<3>(3) = rk.v_rel;
  f.segment<3>(6) = rk.T_rel.col(0);
  f.segment<3>(9) = rk.T_rel.col(1);
  f.segment<3>(12) = rk.omega_rel;
  f(15) = rk.r_rel.squaredNorm();
  f(16) = rk.v_rel.squaredNorm();
  // the encoding reads only the first two rotation columns; the trace's
  // third diagonal entry is reconstructed from their cross product
  const double t22 = rk.T_rel(0, 0) * rk.T_rel(1, 1) - rk.T_rel(1, 0) * rk.T_rel(0, 1);
  const double arg =
      std::clamp((rk.T_rel(0, 0) + rk.T_rel(1, 1) + t22 - 1.0) / 2.0, -1.0, 1.0);
  const double alpha = std::acos(arg);
  f(17) = alpha * alpha;
  f(18) = rk.omega_rel.squaredNorm();
  return f;
}

FeatureJacobian feature_jacobian(const RelativeKinematics& rk) {
  FeatureJacobian jac = FeatureJacobian::Zero();
  // columns: 0-2 r_rel, 3-5 v_rel, 6-8 omega_rel, 9-11 theta (left rotation
  // perturbation in the headrest frame)
  jac.block<3, 3>(0, 0).setIdentity();
  jac.block<3, 3>(3, 3).setIdentity();
  // d(col_j) = theta x col_j = -[col_j]_x theta
  jac.block<3, 3>(6, 9) = -skew(rk.T_rel.col(0));
  jac.block<3, 3>(9, 9) = -skew(rk.T_rel.col(1));
  jac.block<3, 3>(12, 6).setIdentity();
  jac.block<1, 3>(15, 0) = 2.0 * rk.r_rel.transpose();
  jac.block<1, 3>(16, 3) = 2.0 * rk.v_rel.transpose();
  // d(alpha^2) = 2 * (alpha * axis) . theta, smooth through alpha = 0
  jac.block<1, 3>(17, 9) = 2.0 * rotation_vector(rk.T_rel).transpose();
  jac.block<1, 3>(18, 6) = 2.0 * rk.omega_rel.transpose();
  return jac;
}

}  // namespace alc
