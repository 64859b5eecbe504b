#include "alcontact/contact_model.hpp"

#include <cmath>
#include <utility>

namespace alc {

SurrogateContact::SurrogateContact(MlpModel force_model, MlpModel moment_model,
                                   ModelParams params)
    : force_model_(std::move(force_model)),
      moment_model_(std::move(moment_model)),
      params_(std::move(params)) {}

Wrench SurrogateContact::wrench(double q, double qdot) const {
  return predict_wrench(force_model_, moment_model_,
                        state_relative_kinematics(q, qdot, params_));
}

double SurrogateContact::generalized_force(double q, double qdot) const {
  return project_contact_wrench(q, wrench(q, qdot), params_);
}

Eigen::Vector2d SurrogateContact::generalized_force_gradient(double q,
                                                             double qdot) const {
  const RelativeKinematics rk = state_relative_kinematics(q, qdot, params_);
  const FeatureVector features = encode_features(rk);
  const Eigen::Matrix<double, kFeatureCount, 2> dfeat =
      feature_jacobian(rk) * state_kinematics_jacobian(q, qdot, params_);

  const Eigen::Matrix3d& r_hr = params_.headrest.rotation;
  const Eigen::Vector3d force_w = r_hr * mlp_forward(force_model_, features);
  const Eigen::Matrix<double, 3, 2> dforce_w =
      r_hr * (mlp_input_jacobian(force_model_, features) * dfeat);
  const Eigen::Matrix<double, 3, 2> dmoment_w =
      r_hr * (mlp_input_jacobian(moment_model_, features) * dfeat);

  const double l = params_.cog_offset;
  const Eigen::Vector3d lin_jac(l * std::cos(q), 0.0, -l * std::sin(q));
  const Eigen::Vector3d lin_jac_dq(-l * std::sin(q), 0.0, -l * std::cos(q));
  const Eigen::Vector3d& ang_jac = params_.joint_axis;

  const Eigen::RowVector2d grad_row =
      lin_jac.transpose() * dforce_w + ang_jac.transpose() * dmoment_w;
  Eigen::Vector2d grad = grad_row.transpose();
  grad(0) += lin_jac_dq.dot(force_w);
  return grad;
}

}  // namespace alc
