#pragma once

#include <Eigen/Dense>

#include "alcontact/headneck.hpp"
#include "alcontact/mlp.hpp"

namespace alc {

/// Contact wrench reduced to the joint coordinate: the differentiable
/// f_cm(q, qdot) term the transcription adds to the equations of motion.
class JointContactModel {
 public:
  virtual ~JointContactModel() = default;

  virtual double generalized_force(double q, double qdot) const = 0;

  /// [d f_cm/dq, d f_cm/dqdot].
  virtual Eigen::Vector2d generalized_force_gradient(double q, double qdot) const = 0;

  /// The underlying wrench in the headrest frame (for diagnostics/export).
  virtual Wrench wrench(double q, double qdot) const = 0;
};

/// The learned contact model: encode features, run both nets, project the
/// wrench onto the joint. Gradients flow analytically through the full chain.
class SurrogateContact final : public JointContactModel {
 public:
  SurrogateContact(MlpModel force_model, MlpModel moment_model, ModelParams params);

  double generalized_force(double q, double qdot) const override;
  Eigen::Vector2d generalized_force_gradient(double q, double qdot) const override;
  Wrench wrench(double q, double qdot) const override;

  const MlpModel& force_model() const { return force_model_; }
  const MlpModel& moment_model() const { return moment_model_; }

 private:
  MlpModel force_model_;
  MlpModel moment_model_;
  ModelParams params_;
};

}  // namespace alc
