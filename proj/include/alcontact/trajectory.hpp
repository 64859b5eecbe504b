#pragma once

#include <filesystem>
#include <vector>

namespace alc {

/// Discrete joint trajectory on a uniform grid: N+1 nodes for times, q and
/// qdot, N piecewise-constant actuations (one per interval).
struct Trajectory {
  std::vector<double> times;  // [s]
  std::vector<double> q;      // [rad]
  std::vector<double> qdot;   // [rad/s]
  std::vector<double> tau;    // [Nm], size times.size() - 1

  /// Throws std::invalid_argument on inconsistent lengths or a non-uniform,
  /// non-increasing grid.
  void validate() const;

  double step() const;

  /// Linear interpolation of q and qdot at time t (t clamped to the grid).
  void sample(double t, double& q_out, double& qdot_out) const;
};

inline constexpr const char* kTrajectoryCsvHeader = "time,q,qdot,tau";

/// Trajectory CSV: one row per node, tau of the final node written empty.
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);
Trajectory read_trajectory_csv(const std::filesystem::path& path);

}  // namespace alc
