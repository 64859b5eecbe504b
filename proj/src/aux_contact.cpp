#include "alcontact/aux_contact.hpp"

#include <cmath>
#include <stdexcept>

#include "alcontact/rng.hpp"

namespace alc {

Eigen::Vector3d AuxParams::default_contact_point(double head_radius) {
  // world +x at q = 0.30, pulled back through the head rotation
  return head_radius * Eigen::Vector3d(std::cos(0.30), 0.0, std::sin(0.30));
}

void AuxParams::validate() const {
  if (!(stiffness > 0.0) || damping < 0.0 || !(ref_penetration > 0.0)) {
    throw std::invalid_argument("aux params: k > 0, d0 >= 0, p_ref > 0 required");
  }
  if (std::abs(normal.norm() - 1.0) > 1e-9) {
    throw std::invalid_argument("aux params: normal must be a unit vector");
  }
}

AuxForceResult aux_force(double p_mm, double pdot_mm_s, const AuxParams& params,
                         const Eigen::Vector3d& lever_arm) {
  AuxForceResult result;
  result.f_scalar = p_mm * p_mm * params.stiffness +
                    pdot_mm_s * params.damping *
                        (1.0 - std::exp(-std::abs(p_mm) / params.ref_penetration));
  if (p_mm > 0.0 && result.f_scalar > 0.0) {
    result.force = result.f_scalar * params.normal;
    result.moment = lever_arm.cross(result.force);
  }
  return result;
}

AuxForceResult aux_force(double p_mm, double pdot_mm_s, const AuxParams& params) {
  return aux_force(p_mm, pdot_mm_s, params, params.r_sp);
}

void LhsSpec::validate() const {
  if (sample_count < 2) {
    throw std::invalid_argument("lhs: need at least 2 samples");
  }
  if (!(q_min < q_max) || !(qdot_min < qdot_max)) {
    throw std::invalid_argument("lhs: degenerate sampling ranges");
  }
}

std::vector<State> lhs_sample(const LhsSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const std::size_t k = static_cast<std::size_t>(spec.sample_count);

  const auto stratified = [&rng, k](double lo, double hi) {
    std::vector<double> values(k);
    const double width = (hi - lo) / static_cast<double>(k);
    for (std::size_t j = 0; j < k; ++j) {
      values[j] = lo + (static_cast<double>(j) + rng.uniform()) * width;
    }
    rng.shuffle(values);
    return values;
  };

  const std::vector<double> qs = stratified(spec.q_min, spec.q_max);
  const std::vector<double> qdots = stratified(spec.qdot_min, spec.qdot_max);

  std::vector<State> states(k);
  for (std::size_t i = 0; i < k; ++i) states[i] = State{qs[i], qdots[i]};
  return states;
}

std::vector<ContactSample> preliminary_dataset(const LhsSpec& spec,
                                               const AuxParams& aux,
                                               const ModelParams& model,
                                               const std::string& trajectory_id) {
  aux.validate();
  model.validate();
  const std::vector<State> states = lhs_sample(spec);

  const Eigen::Matrix3d& r_hr = model.headrest.rotation;
  const Eigen::Vector3d n_world = r_hr * aux.normal;

  std::vector<ContactSample> samples;
  samples.reserve(states.size());
  for (const State& s : states) {
    const HeadPose pose = head_frame(s.q, model);
    const Eigen::Vector3d arm_world = pose.frame.rotation * aux.r_sp;
    const Eigen::Vector3d point = pose.frame.origin + arm_world;
    const Eigen::Vector3d point_vel =
        s.qdot * (pose.lin_jac + pose.ang_jac.cross(arm_world));

    // penetration past the headrest plane, measured against the outward normal
    const double p_m = -n_world.dot(point - model.headrest.origin);
    const double pdot_m = -n_world.dot(point_vel);

    const AuxForceResult fr =
        aux_force(1e3 * p_m, 1e3 * pdot_m, aux, r_hr.transpose() * arm_world);

    ContactSample sample;
    sample.rk = state_relative_kinematics(s.q, s.qdot, model);
    sample.force = fr.force;
    sample.moment = fr.moment;
    sample.provenance = Provenance::preliminary;
    sample.trajectory_id = trajectory_id;
    sample.time = 0.0;
    samples.push_back(std::move(sample));
  }
  return samples;
}

}  // namespace alc
