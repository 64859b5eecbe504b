#include "alcontact/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace alc {

StressStrainCurve StressStrainCurve::low_density_foam() {
  StressStrainCurve curve;
  curve.strain = {0.0, 0.1, 0.6, 0.9};
  curve.stress = {0.0, 10e3, 15e3, 120e3};
  return curve;
}

void StressStrainCurve::validate() const {
  if (strain.size() < 2 || strain.size() != stress.size()) {
    throw std::invalid_argument("stress-strain curve: need >= 2 matching knots");
  }
  if (strain.front() != 0.0 || stress.front() != 0.0) {
    throw std::invalid_argument("stress-strain curve: first knot must be (0, 0)");
  }
  for (std::size_t i = 1; i < strain.size(); ++i) {
    if (!(strain[i] > strain[i - 1]) || !(stress[i] > stress[i - 1])) {
      throw std::invalid_argument("stress-strain curve: knots must be strictly "
                                  "increasing");
    }
  }
  if (strain.back() > 0.95) {
    throw std::invalid_argument("stress-strain curve: knots must lie in [0, 0.95]");
  }
}

double StressStrainCurve::operator()(double eps) const {
  if (eps <= 0.0) return 0.0;
  const std::size_t n = strain.size();
  if (eps >= strain.back()) {
    const double slope =
        (stress[n - 1] - stress[n - 2]) / (strain[n - 1] - strain[n - 2]);
    return stress.back() + slope * (eps - strain.back());
  }
  std::size_t hi = 1;
  while (strain[hi] < eps) ++hi;
  const double t = (eps - strain[hi - 1]) / (strain[hi] - strain[hi - 1]);
  return stress[hi - 1] + t * (stress[hi] - stress[hi - 1]);
}

void FoamBed::validate() const {
  if (nodes_u < 1 || nodes_w < 1) {
    throw std::invalid_argument("foam bed: need at least one node per direction");
  }
  if (!(patch_u > 0.0) || !(patch_w > 0.0) || !(thickness > 0.0)) {
    throw std::invalid_argument("foam bed: patch and thickness must be positive");
  }
  if (damping < 0.0) {
    throw std::invalid_argument("foam bed: damping must be nonnegative");
  }
  if (std::abs(normal.norm() - 1.0) > 1e-9) {
    throw std::invalid_argument("foam bed: normal must be a unit vector");
  }
  curve.validate();
}

PenetrationResult node_penetration(const Eigen::Vector3d& sphere_center,
                                   double sphere_radius,
                                   const Eigen::Vector3d& node_pos,
                                   const Eigen::Vector3d& normal,
                                   const Eigen::Vector3d& center_velocity,
                                   const Eigen::Vector3d& angular_velocity) {
  PenetrationResult result;
  const Eigen::Vector3d d = sphere_center - node_pos;
  const double d_n = d.dot(normal);
  const Eigen::Vector3d d_perp = d - d_n * normal;
  const double lateral_sq = d_perp.squaredNorm();
  const double radius_sq = sphere_radius * sphere_radius;
  if (lateral_sq >= radius_sq) {
    return result;  // column misses the sphere
  }
  const double reach = std::sqrt(radius_sq - lateral_sq);
  result.depth = reach - d_n;
  // material point of the sphere surface directly above the node
  result.contact_point = node_pos + (d_n - reach) * normal;
  const Eigen::Vector3d point_velocity =
      center_velocity + angular_velocity.cross(result.contact_point - sphere_center);
  result.rate = -point_velocity.dot(normal);
  return result;
}

double node_force(double depth, double rate, const FoamBed& bed) {
  if (depth <= 0.0) return 0.0;
  const double eps = std::clamp(depth / bed.thickness, 0.0, 0.95);
  const double pressure = bed.curve(eps) + bed.damping * (rate / bed.thickness);
  if (pressure <= 0.0) return 0.0;  // no adhesion
  return pressure * bed.node_area();
}

namespace {

struct BedGeometry {
  std::vector<Eigen::Vector3d> node_positions;  // world
  Eigen::Vector3d normal_world;
};

BedGeometry bed_geometry(const FoamBed& bed, const ModelParams& params) {
  BedGeometry geom;
  const Eigen::Matrix3d& r_hr = params.headrest.rotation;
  geom.normal_world = r_hr * bed.normal;
  // plane through the headrest origin, spanned by the frame's y and z axes
  const Eigen::Vector3d axis_u = r_hr.col(1);
  const Eigen::Vector3d axis_w = r_hr.col(2);
  const double du = bed.patch_u / bed.nodes_u;
  const double dw = bed.patch_w / bed.nodes_w;
  geom.node_positions.reserve(static_cast<std::size_t>(bed.nodes_u) * bed.nodes_w);
  for (int i = 0; i < bed.nodes_u; ++i) {
    const double u = -0.5 * bed.patch_u + (i + 0.5) * du;
    for (int j = 0; j < bed.nodes_w; ++j) {
      const double w = -0.5 * bed.patch_w + (j + 0.5) * dw;
      geom.node_positions.push_back(params.headrest.origin + u * axis_u + w * axis_w);
    }
  }
  return geom;
}

}  // namespace

ReplayResult replay_detailed(const Trajectory& traj, const FoamBed& bed,
                             const ModelParams& params,
                             const std::string& trajectory_id) {
  traj.validate();
  bed.validate();
  params.validate();
  if (traj.times.front() > 0.0 || traj.times.back() < kOracleHorizon - 1e-9) {
    throw std::invalid_argument("replay: trajectory must cover [0, 1] s");
  }

  const BedGeometry geom = bed_geometry(bed, params);
  const Eigen::Matrix3d hr_t = params.headrest.rotation.transpose();
  const double area = bed.node_area();

  ReplayResult result;
  result.dataset.trajectory_id = trajectory_id;
  result.dataset.samples.reserve(kOracleSampleCount);
  result.dissipated_power.reserve(kOracleSampleCount);

  for (int k = 0; k < kOracleSampleCount; ++k) {
    const double t = k * kOracleStep;
    double q = 0.0, qdot = 0.0;
    traj.sample(t, q, qdot);

    const HeadPose pose = head_frame(q, params);
    const Twist twist = pose.twist(qdot);

    Eigen::Vector3d force_world = Eigen::Vector3d::Zero();
    Eigen::Vector3d moment_world = Eigen::Vector3d::Zero();
    double dissipation = 0.0;
    for (const Eigen::Vector3d& node : geom.node_positions) {
      const PenetrationResult pen =
          node_penetration(pose.frame.origin, params.head_radius, node,
                           geom.normal_world, twist.v, twist.omega);
      if (pen.depth <= 0.0) continue;
      const double f = node_force(pen.depth, pen.rate, bed);
      if (f > 0.0) {
        const Eigen::Vector3d node_force_vec = f * geom.normal_world;
        force_world += node_force_vec;
        moment_world += (pen.contact_point - pose.frame.origin).cross(node_force_vec);
      }
      dissipation += bed.damping * (pen.rate / bed.thickness) * (pen.rate / bed.thickness) *
                     area * bed.thickness;
    }

    ContactSample sample;
    sample.rk = relative_kinematics(pose.frame, twist, params.headrest, Twist{});
    sample.force = hr_t * force_world;
    sample.moment = hr_t * moment_world;
    sample.provenance = Provenance::oracle;
    sample.trajectory_id = trajectory_id;
    sample.time = t;
    result.dataset.samples.push_back(std::move(sample));
    result.dissipated_power.push_back(dissipation);
  }
  return result;
}

OracleDataset replay(const Trajectory& traj, const FoamBed& bed,
                     const ModelParams& params, const std::string& trajectory_id) {
  return replay_detailed(traj, bed, params, trajectory_id).dataset;
}

}  // namespace alc
