#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "alcontact/dataset.hpp"
#include "alcontact/headneck.hpp"
#include "alcontact/kinematics.hpp"
#include "alcontact/rng.hpp"

namespace alc {

/// Fully connected network with softplus hidden layers, identity output and
/// built-in input normalization. The two canonical wrench nets are
/// [19,6,6,4,3] (force) and [19,6,6,6,4,3] (moment).
struct MlpModel {
  std::vector<int> layer_dims;
  std::vector<Eigen::MatrixXd> weights;  // weights[l]: dims[l+1] x dims[l]
  std::vector<Eigen::VectorXd> biases;   // biases[l]:  dims[l+1]
  Eigen::VectorXd norm_mean;             // size dims[0]
  Eigen::VectorXd norm_std;              // size dims[0], entries > 0
  std::uint64_t seed = 0;                // seed used at initialization

  static MlpModel make_force_net() { return zeros({19, 6, 6, 4, 3}); }
  static MlpModel make_moment_net() { return zeros({19, 6, 6, 6, 4, 3}); }
  static MlpModel zeros(const std::vector<int>& dims);

  int input_dim() const { return layer_dims.front(); }
  int output_dim() const { return layer_dims.back(); }

  /// Glorot-uniform weights (+-sqrt(6/(fan_in+fan_out))), zero biases.
  void init_weights(Rng& rng);
};

struct TrainConfig {
  double learning_rate = 0.01;
  int batch_size = 1024;
  int patience = 6;     // epochs without validation improvement
  int max_epochs = 500;
  std::uint64_t seed = 0;
};

struct SplitSpec {
  double test_fraction = 0.30;  // whole trajectories
  double val_fraction = 0.20;   // samples within the training trajectories
  std::uint64_t seed = 0;
};

/// Overflow-safe softplus ln(1 + e^x) and its derivative (logistic).
double softplus(double x);
double softplus_prime(double x);

Eigen::VectorXd mlp_forward(const MlpModel& model, const Eigen::VectorXd& input);

/// d(output)/d(input), exact chain rule including the 1/norm_std scaling.
Eigen::MatrixXd mlp_input_jacobian(const MlpModel& model, const Eigen::VectorXd& input);

/// Per-feature mean and population standard deviation; std entries below
/// 1e-12 are replaced by 1. Throws on fewer than 2 samples.
std::pair<Eigen::VectorXd, Eigen::VectorXd> fit_normalizer(const Eigen::MatrixXd& rows);

struct SplitResult {
  std::vector<ContactSample> train;
  std::vector<ContactSample> val;
  std::vector<TrajectorySamples> test;
  std::vector<std::string> train_trajectory_ids;
  std::vector<std::string> test_trajectory_ids;
};

/// Trajectory-wise train/test split followed by a sample-wise train/val
/// split, both driven by the seeded generator. Throws if the pool holds
/// fewer than 2 trajectories.
SplitResult split(const std::vector<TrajectorySamples>& pool, const SplitSpec& spec);

struct TrainResult {
  MlpModel model;
  int epochs_run = 0;
  double best_val_loss = 0.0;
  std::vector<double> val_loss_history;  // one entry per epoch
};

/// Adam (beta1 0.9, beta2 0.999, eps 1e-8) on mean squared error over all
/// output components, early stopping on validation loss. Returns the
/// parameters from the best validation epoch. The normalizer of model_init
/// is used as-is; fit it from the training split beforehand.
TrainResult train(const MlpModel& model_init, const Eigen::MatrixXd& train_x,
                  const Eigen::MatrixXd& train_y, const Eigen::MatrixXd& val_x,
                  const Eigen::MatrixXd& val_y, const TrainConfig& cfg);

/// Stacks sample features / force targets / moment targets as matrix rows.
Eigen::MatrixXd feature_matrix(const std::vector<ContactSample>& samples);
Eigen::MatrixXd force_matrix(const std::vector<ContactSample>& samples);
Eigen::MatrixXd moment_matrix(const std::vector<ContactSample>& samples);

/// Mean squared error over all entries of (pred - truth).
double mse(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& truth);

Wrench predict_wrench(const MlpModel& force_model, const MlpModel& moment_model,
                      const RelativeKinematics& rk);

/// Lossless structured-text (JSON) model serialization.
void save_model(const std::filesystem::path& path, const MlpModel& model);
MlpModel load_model(const std::filesystem::path& path);

}  // namespace alc
