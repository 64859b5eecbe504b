#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "alcontact/dataset.hpp"
#include "alcontact/headneck.hpp"

namespace alc {

/// Quadratic-stiffness viscoelastic point-contact model. The printed
/// parameter values are in mm/N units; penetrations are converted to mm at
/// the call boundary.
struct AuxParams {
  double stiffness = 6.0;        // k   [N/mm^2]
  double damping = 0.1;          // d0  [N s/mm^2]
  double ref_penetration = 2.0;  // p_ref [mm]
  Eigen::Vector3d r_sp = default_contact_point(0.09);  // head frame [m]
  Eigen::Vector3d normal = Eigen::Vector3d(-1.0, 0.0, 0.0);  // headrest frame, outward

  /// The rearmost sphere-surface point at q = 0.30 rad, fixed in head frame.
  static Eigen::Vector3d default_contact_point(double head_radius);

  void validate() const;
};

struct AuxForceResult {
  double f_scalar = 0.0;                              // [N]
  Eigen::Vector3d force = Eigen::Vector3d::Zero();    // [N]
  Eigen::Vector3d moment = Eigen::Vector3d::Zero();   // [Nm]
};

/// f = p^2 k + pdot d0 (1 - e^{-|p|/p_ref}); force = f * n only when p > 0
/// and f > 0 (non-sticking); moment = lever_arm x force. The lever arm must
/// be expressed in the same frame as the force.
AuxForceResult aux_force(double p_mm, double pdot_mm_s, const AuxParams& params,
                         const Eigen::Vector3d& lever_arm);

/// Variant using params.r_sp as the lever arm directly.
AuxForceResult aux_force(double p_mm, double pdot_mm_s, const AuxParams& params);

struct LhsSpec {
  int sample_count = 2000;
  double q_min = 0.02, q_max = 0.42;          // [rad]
  double qdot_min = -5.0, qdot_max = 5.0;     // [rad/s]
  std::uint64_t seed = 0;

  void validate() const;
};

/// Latin hypercube sample of (q, qdot): every marginal puts exactly one
/// sample in each of the K equal-width bins.
std::vector<State> lhs_sample(const LhsSpec& spec);

/// Evaluates the auxiliary model at LHS states and packages the results as
/// preliminary contact samples (zero-wrench samples are kept).
std::vector<ContactSample> preliminary_dataset(const LhsSpec& spec,
                                               const AuxParams& aux,
                                               const ModelParams& model,
                                               const std::string& trajectory_id = "prelim");

}  // namespace alc
