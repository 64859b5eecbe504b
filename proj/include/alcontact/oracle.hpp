#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "alcontact/dataset.hpp"
#include "alcontact/headneck.hpp"
#include "alcontact/trajectory.hpp"

namespace alc {

inline constexpr double kOracleStep = 0.0025;  // [s]
inline constexpr double kOracleHorizon = 1.0;  // [s]
inline constexpr int kOracleSampleCount = 401;

/// Piecewise-linear stress-strain curve, strictly increasing knots, linear
/// extrapolation beyond the last knot with the final slope.
struct StressStrainCurve {
  std::vector<double> strain;  // [-]
  std::vector<double> stress;  // [Pa]

  static StressStrainCurve low_density_foam();

  double operator()(double eps) const;
  void validate() const;
};

/// Winkler-style bed of independent nonlinear spring-damper columns on the
/// headrest front plane.
struct FoamBed {
  int nodes_u = 40;
  int nodes_w = 40;
  double patch_u = 0.24;    // [m], along the headrest y axis
  double patch_w = 0.24;    // [m], along the headrest z axis
  double thickness = 0.06;  // [m]
  StressStrainCurve curve = StressStrainCurve::low_density_foam();
  double damping = 2000.0;  // [Pa s / m] per unit strain rate
  Eigen::Vector3d normal = Eigen::Vector3d(-1.0, 0.0, 0.0);  // headrest frame, outward

  double node_area() const {
    return patch_u * patch_w / (static_cast<double>(nodes_u) * static_cast<double>(nodes_w));
  }

  void validate() const;
};

struct PenetrationResult {
  double depth = -1.0;  // [m], positive means interpenetration
  double rate = 0.0;    // [m/s], positive means compressing
  Eigen::Vector3d contact_point = Eigen::Vector3d::Zero();  // sphere surface above the node
};

/// Penetration of a sphere into the node's column along the outward normal.
/// Separated configurations (including columns missing the sphere laterally)
/// report depth <= 0. The rate is the normal approach speed of the sphere
/// surface point above the node.
PenetrationResult node_penetration(const Eigen::Vector3d& sphere_center,
                                   double sphere_radius,
                                   const Eigen::Vector3d& node_pos,
                                   const Eigen::Vector3d& normal,
                                   const Eigen::Vector3d& center_velocity,
                                   const Eigen::Vector3d& angular_velocity);

/// Scalar normal force on one node column; clamped at zero (no adhesion).
double node_force(double depth, double rate, const FoamBed& bed);

struct OracleDataset {
  std::string trajectory_id;
  std::vector<ContactSample> samples;  // kOracleSampleCount entries
};

struct ReplayResult {
  OracleDataset dataset;
  std::vector<double> dissipated_power;  // [W] per sample
};

/// Replays the [0, 1] s portion of a trajectory through the foam bed and
/// emits one wrench sample every 0.0025 s (401 points). Throws if the
/// trajectory does not cover the replay horizon.
OracleDataset replay(const Trajectory& traj, const FoamBed& bed,
                     const ModelParams& params, const std::string& trajectory_id);

ReplayResult replay_detailed(const Trajectory& traj, const FoamBed& bed,
                             const ModelParams& params,
                             const std::string& trajectory_id);

}  // namespace alc
