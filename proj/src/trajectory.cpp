#include "alcontact/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "alcontact/io.hpp"

namespace alc {

void Trajectory::validate() const {
  if (times.size() < 2) {
    throw std::invalid_argument("trajectory: need at least 2 nodes");
  }
  if (q.size() != times.size() || qdot.size() != times.size() ||
      tau.size() != times.size() - 1) {
    throw std::invalid_argument("trajectory: inconsistent array lengths");
  }
  const double h = times[1] - times[0];
  if (!(h > 0.0)) {
    throw std::invalid_argument("trajectory: times must be strictly increasing");
  }
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (std::abs((times[k] - times[k - 1]) - h) > 1e-9 * std::max(1.0, h)) {
      throw std::invalid_argument("trajectory: non-uniform time step");
    }
  }
}

double Trajectory::step() const { return times[1] - times[0]; }

void Trajectory::sample(double t, double& q_out, double& qdot_out) const {
  if (t <= times.front()) {
    q_out = q.front();
    qdot_out = qdot.front();
    return;
  }
  if (t >= times.back()) {
    q_out = q.back();
    qdot_out = qdot.back();
    return;
  }
  const double h = step();
  const std::size_t k = std::min<std::size_t>(
      static_cast<std::size_t>((t - times.front()) / h), times.size() - 2);
  const double alpha = std::clamp((t - times[k]) / h, 0.0, 1.0);
  q_out = (1.0 - alpha) * q[k] + alpha * q[k + 1];
  qdot_out = (1.0 - alpha) * qdot[k] + alpha * qdot[k + 1];
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
  traj.validate();
  std::string out(kTrajectoryCsvHeader);
  out.push_back('\n');
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    out += io::format_double(traj.times[k]);
    out.push_back(',');
    out += io::format_double(traj.q[k]);
    out.push_back(',');
    out += io::format_double(traj.qdot[k]);
    out.push_back(',');
    if (k < traj.tau.size()) out += io::format_double(traj.tau[k]);
    out.push_back('\n');
  }
  io::atomic_write(path, out);
}

Trajectory read_trajectory_csv(const std::filesystem::path& path) {
  const auto rows = io::read_csv(path, kTrajectoryCsvHeader);
  Trajectory traj;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.size() != 4) {
      throw std::runtime_error("trajectory csv row with " +
                               std::to_string(row.size()) + " fields in " +
                               path.string());
    }
    traj.times.push_back(io::parse_double(row[0]));
    traj.q.push_back(io::parse_double(row[1]));
    traj.qdot.push_back(io::parse_double(row[2]));
    if (!row[3].empty()) {
      traj.tau.push_back(io::parse_double(row[3]));
    } else if (i + 1 != rows.size()) {
      throw std::runtime_error("trajectory csv: empty tau before final row in " +
                               path.string());
    }
  }
  traj.validate();
  return traj;
}

}  // namespace alc
