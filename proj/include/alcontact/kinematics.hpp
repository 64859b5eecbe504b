#pragma once

#include <Eigen/Dense>

namespace alc {

inline constexpr int kFeatureCount = 19;

using FeatureVector = Eigen::Matrix<double, kFeatureCount, 1>;

/// d(features)/d[r_rel(3), v_rel(3), omega_rel(3), theta(3)], where theta is
/// a left (headrest-frame) perturbation of T_rel: dT = [theta]_x * T_rel.
using FeatureJacobian = Eigen::Matrix<double, kFeatureCount, 12>;

/// A rigid frame: origin and column-axis rotation, both in world coordinates.
struct Frame {
  Eigen::Vector3d origin = Eigen::Vector3d::Zero();
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();

  /// Throws std::invalid_argument unless rotation is orthonormal with
  /// determinant +1 (tolerance 1e-12 elementwise).
  void validate() const;
};

/// Linear and angular velocity, world coordinates.
struct Twist {
  Eigen::Vector3d v = Eigen::Vector3d::Zero();
  Eigen::Vector3d omega = Eigen::Vector3d::Zero();
};

/// Kinematics of the head frame relative to the headrest frame, every
/// quantity expressed in the current headrest coordinate system.
struct RelativeKinematics {
  Eigen::Vector3d r_rel = Eigen::Vector3d::Zero();
  Eigen::Vector3d v_rel = Eigen::Vector3d::Zero();
  Eigen::Matrix3d T_rel = Eigen::Matrix3d::Identity();
  Eigen::Vector3d omega_rel = Eigen::Vector3d::Zero();
};

/// Rotation matrix about a unit axis.
Eigen::Matrix3d rotation_about(const Eigen::Vector3d& unit_axis, double angle);

/// Skew-symmetric cross-product matrix [a]_x.
Eigen::Matrix3d skew(const Eigen::Vector3d& a);

RelativeKinematics relative_kinematics(const Frame& head, const Twist& head_twist,
                                       const Frame& headrest,
                                       const Twist& headrest_twist);

/// Angle between the two frames: arccos((trace(T_rel) - 1) / 2), argument
/// clamped to [-1, 1].
double relative_angle(const Eigen::Matrix3d& t_rel);

/// Rotation vector (axis * angle) of an orthonormal matrix; smooth at the
/// identity, well-conditioned up to angle pi.
Eigen::Vector3d rotation_vector(const Eigen::Matrix3d& rotation);

/// The 19-entry feature encoding:
/// [r_rel, v_rel, T_rel col 1, T_rel col 2, omega_rel,
///  |r_rel|^2, |v_rel|^2, |alpha_rel|^2, |omega_rel|^2].
FeatureVector encode_features(const RelativeKinematics& rk);

FeatureJacobian feature_jacobian(const RelativeKinematics& rk);

}  // namespace alc
