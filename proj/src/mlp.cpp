#include "alcontact/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "alcontact/io.hpp"

namespace alc {

namespace {

void check_dims(const MlpModel& model) {
  if (model.layer_dims.size() < 2) {
    throw std::invalid_argument("mlp: need at least input and output layer");
  }
  const std::size_t n_layers = model.layer_dims.size() - 1;
  if (model.weights.size() != n_layers || model.biases.size() != n_layers) {
    throw std::invalid_argument("mlp: weights/biases do not match layer_dims");
  }
  for (std::size_t l = 0; l < n_layers; ++l) {
    if (model.weights[l].rows() != model.layer_dims[l + 1] ||
        model.weights[l].cols() != model.layer_dims[l] ||
        model.biases[l].size() != model.layer_dims[l + 1]) {
      throw std::invalid_argument("mlp: layer " + std::to_string(l) +
                                  " has inconsistent shape");
    }
  }
  if (model.norm_mean.size() != model.layer_dims.front() ||
      model.norm_std.size() != model.layer_dims.front()) {
    throw std::invalid_argument("mlp: normalizer size does not match input dim");
  }
}

}  // namespace

MlpModel MlpModel::zeros(const std::vector<int>& dims) {
  MlpModel model;
  model.layer_dims = dims;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    model.weights.emplace_back(Eigen::MatrixXd::Zero(dims[l + 1], dims[l]));
    model.biases.emplace_back(Eigen::VectorXd::Zero(dims[l + 1]));
  }
  model.norm_mean = Eigen::VectorXd::Zero(dims.front());
  model.norm_std = Eigen::VectorXd::Ones(dims.front());
  return model;
}

void MlpModel::init_weights(Rng& rng) {
  for (std::size_t l = 0; l < weights.size(); ++l) {
    const double fan_in = static_cast<double>(weights[l].cols());
    const double fan_out = static_cast<double>(weights[l].rows());
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    for (Eigen::Index r = 0; r < weights[l].rows(); ++r) {
      for (Eigen::Index c = 0; c < weights[l].cols(); ++c) {
        weights[l](r, c) = rng.uniform(-bound, bound);
      }
    }
    biases[l].setZero();
  }
}

double softplus(double x) {
  if (x > 30.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double softplus_prime(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Eigen::VectorXd mlp_forward(const MlpModel& model, const Eigen::VectorXd& input) {
  check_dims(model);
  if (input.size() != model.input_dim()) {
    throw std::invalid_argument("mlp_forward: input size mismatch");
  }
  Eigen::VectorXd z = (input - model.norm_mean).cwiseQuotient(model.norm_std);
  const std::size_t n_layers = model.weights.size();
  for (std::size_t l = 0; l < n_layers; ++l) {
    Eigen::VectorXd pre = model.weights[l] * z + model.biases[l];
    if (l + 1 < n_layers) {
      z = pre.unaryExpr([](double x) { return softplus(x); });
    } else {
      z = std::move(pre);
    }
  }
  return z;
}

Eigen::MatrixXd mlp_input_jacobian(const MlpModel& model, const Eigen::VectorXd& input) {
  check_dims(model);
  if (input.size() != model.input_dim()) {
    throw std::invalid_argument("mlp_input_jacobian: input size mismatch");
  }
  Eigen::VectorXd z = (input - model.norm_mean).cwiseQuotient(model.norm_std);
  // jac = d z / d input, updated layer by layer
  Eigen::MatrixXd jac = model.norm_std.cwiseInverse().asDiagonal();
  const std::size_t n_layers = model.weights.size();
  for (std::size_t l = 0; l < n_layers; ++l) {
    Eigen::VectorXd pre = model.weights[l] * z + model.biases[l];
    jac = model.weights[l] * jac;
    if (l + 1 < n_layers) {
      const Eigen::VectorXd act_prime =
          pre.unaryExpr([](double x) { return softplus_prime(x); });
      jac = act_prime.asDiagonal() * jac;
      z = pre.unaryExpr([](double x) { return softplus(x); });
    }
  }
  return jac;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> fit_normalizer(const Eigen::MatrixXd& rows) {
  if (rows.rows() < 2) {
    throw std::invalid_argument("fit_normalizer: need at least 2 samples");
  }
  const double n = static_cast<double>(rows.rows());
  Eigen::VectorXd mean = rows.colwise().mean();
  Eigen::VectorXd var = (rows.rowwise() - mean.transpose()).array().square()
                            .colwise().sum().transpose() / n;
  Eigen::VectorXd std = var.cwiseSqrt();
  for (Eigen::Index i = 0; i < std.size(); ++i) {
    if (std(i) < 1e-12) std(i) = 1.0;
  }
  return {std::move(mean), std::move(std)};
}

SplitResult split(const std::vector<TrajectorySamples>& pool, const SplitSpec& spec) {
  if (pool.size() < 2) {
    throw std::invalid_argument("split: need at least 2 trajectories to hold "
                                "one out for testing");
  }
  if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0) ||
      !(spec.val_fraction > 0.0 && spec.val_fraction < 1.0)) {
    throw std::invalid_argument("split: fractions must lie in (0, 1)");
  }
  Rng rng(spec.seed);

  std::vector<std::size_t> order(pool.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);

  const std::size_t n = pool.size();
  std::size_t n_train = static_cast<std::size_t>(
      std::floor((1.0 - spec.test_fraction) * static_cast<double>(n)));
  n_train = std::clamp<std::size_t>(n_train, 1, n - 1);

  SplitResult result;
  std::vector<ContactSample> train_samples;
  for (std::size_t i = 0; i < n; ++i) {
    const TrajectorySamples& traj = pool[order[i]];
    if (i < n_train) {
      result.train_trajectory_ids.push_back(traj.trajectory_id);
      train_samples.insert(train_samples.end(), traj.samples.begin(),
                           traj.samples.end());
    } else {
      result.test_trajectory_ids.push_back(traj.trajectory_id);
      result.test.push_back(traj);
    }
  }

  std::vector<std::size_t> sample_order(train_samples.size());
  for (std::size_t i = 0; i < sample_order.size(); ++i) sample_order[i] = i;
  rng.shuffle(sample_order);

  const std::size_t m = train_samples.size();
  std::size_t m_train = static_cast<std::size_t>(
      std::floor((1.0 - spec.val_fraction) * static_cast<double>(m)));
  if (m >= 2) m_train = std::clamp<std::size_t>(m_train, 1, m - 1);

  for (std::size_t i = 0; i < m; ++i) {
    ContactSample& s = train_samples[sample_order[i]];
    if (i < m_train) {
      result.train.push_back(std::move(s));
    } else {
      result.val.push_back(std::move(s));
    }
  }
  return result;
}

Eigen::MatrixXd feature_matrix(const std::vector<ContactSample>& samples) {
  Eigen::MatrixXd x(samples.size(), kFeatureCount);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    x.row(i) = encode_features(samples[i].rk).transpose();
  }
  return x;
}

Eigen::MatrixXd force_matrix(const std::vector<ContactSample>& samples) {
  Eigen::MatrixXd y(samples.size(), 3);
  for (std::size_t i = 0; i < samples.size(); ++i) y.row(i) = samples[i].force.transpose();
  return y;
}

Eigen::MatrixXd moment_matrix(const std::vector<ContactSample>& samples) {
  Eigen::MatrixXd y(samples.size(), 3);
  for (std::size_t i = 0; i < samples.size(); ++i) y.row(i) = samples[i].moment.transpose();
  return y;
}

double mse(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& truth) {
  if (pred.rows() != truth.rows() || pred.cols() != truth.cols()) {
    throw std::invalid_argument("mse: shape mismatch");
  }
  return (pred - truth).array().square().sum() /
         static_cast<double>(pred.size());
}

namespace {

/// Row-batch forward pass; caches pre-activations for backprop.
struct BatchForward {
  std::vector<Eigen::MatrixXd> activations;  // [0] = normalized input
  std::vector<Eigen::MatrixXd> pre;          // per layer
};

BatchForward batch_forward(const MlpModel& model, const Eigen::MatrixXd& x) {
  BatchForward fw;
  Eigen::MatrixXd z =
      (x.rowwise() - model.norm_mean.transpose()).array().rowwise() /
      model.norm_std.transpose().array();
  fw.activations.push_back(z);
  const std::size_t n_layers = model.weights.size();
  for (std::size_t l = 0; l < n_layers; ++l) {
    Eigen::MatrixXd pre = fw.activations.back() * model.weights[l].transpose();
    pre.rowwise() += model.biases[l].transpose();
    fw.pre.push_back(pre);
    if (l + 1 < n_layers) {
      fw.activations.push_back(pre.unaryExpr([](double v) { return softplus(v); }));
    } else {
      fw.activations.push_back(pre);
    }
  }
  return fw;
}

struct Gradients {
  std::vector<Eigen::MatrixXd> d_weights;
  std::vector<Eigen::VectorXd> d_biases;
};

/// Gradient of mean squared error (mean over batch*outputs).
Gradients batch_backward(const MlpModel& model, const BatchForward& fw,
                         const Eigen::MatrixXd& y) {
  const std::size_t n_layers = model.weights.size();
  Gradients grads;
  grads.d_weights.resize(n_layers);
  grads.d_biases.resize(n_layers);
  const double scale =
      2.0 / (static_cast<double>(y.rows()) * static_cast<double>(y.cols()));
  Eigen::MatrixXd delta = scale * (fw.activations.back() - y);
  for (std::size_t l = n_layers; l-- > 0;) {
    grads.d_weights[l] = delta.transpose() * fw.activations[l];
    grads.d_biases[l] = delta.colwise().sum().transpose();
    if (l > 0) {
      Eigen::MatrixXd act_prime =
          fw.pre[l - 1].unaryExpr([](double v) { return softplus_prime(v); });
      delta = (delta * model.weights[l]).cwiseProduct(act_prime);
    }
  }
  return grads;
}

struct AdamState {
  std::vector<Eigen::MatrixXd> m_w, v_w;
  std::vector<Eigen::VectorXd> m_b, v_b;
  long step = 0;

  explicit AdamState(const MlpModel& model) {
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
      m_w.push_back(Eigen::MatrixXd::Zero(model.weights[l].rows(), model.weights[l].cols()));
      v_w.push_back(Eigen::MatrixXd::Zero(model.weights[l].rows(), model.weights[l].cols()));
      m_b.push_back(Eigen::VectorXd::Zero(model.biases[l].size()));
      v_b.push_back(Eigen::VectorXd::Zero(model.biases[l].size()));
    }
  }

  void update(MlpModel& model, const Gradients& grads, double lr) {
    constexpr double kBeta1 = 0.9;
    constexpr double kBeta2 = 0.999;
    constexpr double kEps = 1e-8;
    ++step;
    const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
    const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
      m_w[l] = kBeta1 * m_w[l] + (1.0 - kBeta1) * grads.d_weights[l];
      v_w[l] = kBeta2 * v_w[l] + (1.0 - kBeta2) * grads.d_weights[l].array().square().matrix();
      model.weights[l].array() -=
          lr * (m_w[l].array() / bc1) / ((v_w[l].array() / bc2).sqrt() + kEps);
      m_b[l] = kBeta1 * m_b[l] + (1.0 - kBeta1) * grads.d_biases[l];
      v_b[l] = kBeta2 * v_b[l] + (1.0 - kBeta2) * grads.d_biases[l].array().square().matrix();
      model.biases[l].array() -=
          lr * (m_b[l].array() / bc1) / ((v_b[l].array() / bc2).sqrt() + kEps);
    }
  }
};

}  // namespace

TrainResult train(const MlpModel& model_init, const Eigen::MatrixXd& train_x,
                  const Eigen::MatrixXd& train_y, const Eigen::MatrixXd& val_x,
                  const Eigen::MatrixXd& val_y, const TrainConfig& cfg) {
  check_dims(model_init);
  if (train_x.rows() == 0) {
    throw std::invalid_argument("train: empty training set");
  }
  if (val_x.rows() == 0) {
    throw std::invalid_argument("train: empty validation set");
  }
  if (cfg.learning_rate <= 0.0 || cfg.batch_size <= 0 || cfg.patience <= 0 ||
      cfg.max_epochs <= 0) {
    throw std::invalid_argument("train: config values must be positive");
  }

  MlpModel model = model_init;
  AdamState adam(model);
  Rng rng(cfg.seed);

  const std::size_t n = static_cast<std::size_t>(train_x.rows());
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;

  TrainResult result;
  result.model = model;
  result.best_val_loss = mse(batch_forward(model, val_x).activations.back(), val_y);
  int epochs_since_best = 0;

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      const std::size_t count = std::min<std::size_t>(cfg.batch_size, n - start);
      Eigen::MatrixXd bx(count, train_x.cols());
      Eigen::MatrixXd by(count, train_y.cols());
      for (std::size_t i = 0; i < count; ++i) {
        bx.row(i) = train_x.row(order[start + i]);
        by.row(i) = train_y.row(order[start + i]);
      }
      const BatchForward fw = batch_forward(model, bx);
      const Gradients grads = batch_backward(model, fw, by);
      adam.update(model, grads, cfg.learning_rate);
    }
    result.epochs_run = epoch;
    const double val_loss = mse(batch_forward(model, val_x).activations.back(), val_y);
    result.val_loss_history.push_back(val_loss);
    if (val_loss < result.best_val_loss) {
      result.best_val_loss = val_loss;
      result.model = model;
      epochs_since_best = 0;
    } else {
      ++epochs_since_best;
      if (epochs_since_best >= cfg.patience) break;
    }
  }
  result.model.seed = cfg.seed;
  return result;
}

Wrench predict_wrench(const MlpModel& force_model, const MlpModel& moment_model,
                      const RelativeKinematics& rk) {
  const FeatureVector features = encode_features(rk);
  Wrench w;
  w.force = mlp_forward(force_model, features);
  w.moment = mlp_forward(moment_model, features);
  w.frame = WrenchFrame::headrest;
  return w;
}

namespace {

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& arr) {
  Eigen::VectorXd v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) v(static_cast<Eigen::Index>(i)) = arr[i].get<double>();
  return v;
}

}  // namespace

void save_model(const std::filesystem::path& path, const MlpModel& model) {
  check_dims(model);
  nlohmann::json doc;
  doc["layer_dims"] = model.layer_dims;
  nlohmann::json activations = nlohmann::json::array();
  for (std::size_t l = 0; l + 1 < model.layer_dims.size(); ++l) {
    activations.push_back(l + 2 < model.layer_dims.size() ? "softplus" : "identity");
  }
  doc["activations"] = activations;
  nlohmann::json layers = nlohmann::json::array();
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    nlohmann::json layer;
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < model.weights[l].rows(); ++r) {
      rows.push_back(vector_to_json(model.weights[l].row(r).transpose()));
    }
    layer["weights"] = rows;
    layer["bias"] = vector_to_json(model.biases[l]);
    layers.push_back(layer);
  }
  doc["layers"] = layers;
  doc["norm_mean"] = vector_to_json(model.norm_mean);
  doc["norm_std"] = vector_to_json(model.norm_std);
  doc["seed"] = model.seed;
  io::atomic_write(path, doc.dump(2) + "\n");
}

MlpModel load_model(const std::filesystem::path& path) {
  const nlohmann::json doc = nlohmann::json::parse(io::read_file(path));
  MlpModel model;
  model.layer_dims = doc.at("layer_dims").get<std::vector<int>>();
  const auto& layers = doc.at("layers");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& rows = layers[l].at("weights");
    Eigen::MatrixXd w(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      w.row(static_cast<Eigen::Index>(r)) = vector_from_json(rows[r]).transpose();
    }
    model.weights.push_back(std::move(w));
    model.biases.push_back(vector_from_json(layers[l].at("bias")));
  }
  model.norm_mean = vector_from_json(doc.at("norm_mean"));
  model.norm_std = vector_from_json(doc.at("norm_std"));
  model.seed = doc.at("seed").get<std::uint64_t>();
  check_dims(model);
  return model;
}

}  // namespace alc
