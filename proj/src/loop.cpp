#include "alcontact/loop.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "alcontact/contact_model.hpp"
#include "alcontact/io.hpp"
#include "alcontact/rng.hpp"
#include "alcontact/trajectory.hpp"

namespace alc {

namespace fs = std::filesystem;

void write_manifest_csv(const fs::path& path, const std::vector<ManifestRow>& rows) {
  std::string out(kManifestCsvHeader);
  out.push_back('\n');
  for (const ManifestRow& row : rows) {
    out += row.trajectory_id;
    out.push_back(',');
    out += to_string(row.provenance);
    out.push_back(',');
    out += std::to_string(row.sample_count);
    out.push_back(',');
    out += std::to_string(row.source_iteration);
    out.push_back('\n');
  }
  io::atomic_write(path, out);
}

std::vector<ManifestRow> read_manifest_csv(const fs::path& path) {
  const auto rows = io::read_csv(path, kManifestCsvHeader);
  std::vector<ManifestRow> result;
  for (const auto& row : rows) {
    if (row.size() != 4) {
      throw std::runtime_error("manifest row with " + std::to_string(row.size()) +
                               " fields in " + path.string());
    }
    ManifestRow m;
    m.trajectory_id = row[0];
    m.provenance = provenance_from_string(row[1]);
    m.sample_count = static_cast<std::size_t>(std::stoull(row[2]));
    m.source_iteration = std::stoi(row[3]);
    result.push_back(std::move(m));
  }
  return result;
}

fs::path DataPool::manifest_path(const fs::path& dir) { return dir / "manifest.csv"; }

fs::path DataPool::samples_path(const fs::path& dir, const std::string& trajectory_id) {
  return dir / ("samples_" + trajectory_id + ".csv");
}

DataPool DataPool::load(const fs::path& dir) {
  DataPool pool;
  const fs::path manifest = manifest_path(dir);
  if (!fs::exists(manifest)) return pool;
  pool.manifest_ = read_manifest_csv(manifest);
  for (const ManifestRow& row : pool.manifest_) {
    TrajectorySamples traj;
    traj.trajectory_id = row.trajectory_id;
    traj.samples = read_sample_csv(samples_path(dir, row.trajectory_id));
    if (traj.samples.size() != row.sample_count) {
      throw std::runtime_error("pool: sample count mismatch for trajectory '" +
                               row.trajectory_id + "'");
    }
    pool.trajectories_.push_back(std::move(traj));
  }
  return pool;
}

std::size_t DataPool::total_samples() const {
  std::size_t total = 0;
  for (const TrajectorySamples& traj : trajectories_) total += traj.samples.size();
  return total;
}

bool DataPool::contains(const std::string& trajectory_id) const {
  for (const ManifestRow& row : manifest_) {
    if (row.trajectory_id == trajectory_id) return true;
  }
  return false;
}

void DataPool::append(const fs::path& dir, TrajectorySamples traj,
                      Provenance provenance, int source_iteration) {
  if (contains(traj.trajectory_id)) {
    throw std::invalid_argument("pool: duplicate trajectory id '" +
                                traj.trajectory_id + "'");
  }
  write_sample_csv(samples_path(dir, traj.trajectory_id), traj.samples);
  append_committed(std::move(traj), provenance, source_iteration);
  write_manifest_csv(manifest_path(dir), manifest_);
}

void DataPool::append_committed(TrajectorySamples traj, Provenance provenance,
                                int source_iteration) {
  if (contains(traj.trajectory_id)) {
    throw std::invalid_argument("pool: duplicate trajectory id '" +
                                traj.trajectory_id + "'");
  }
  ManifestRow row;
  row.trajectory_id = traj.trajectory_id;
  row.provenance = provenance;
  row.sample_count = traj.samples.size();
  row.source_iteration = source_iteration;
  manifest_.push_back(row);
  trajectories_.push_back(std::move(traj));
}

void DataPool::prune_after(const fs::path& dir, int last_iteration) {
  std::vector<ManifestRow> kept;
  bool changed = false;
  for (const ManifestRow& row : manifest_) {
    if (row.source_iteration > last_iteration) {
      changed = true;
      std::error_code ec;
      fs::remove(samples_path(dir, row.trajectory_id), ec);
    } else {
      kept.push_back(row);
    }
  }
  if (!changed) return;
  manifest_ = std::move(kept);
  std::vector<TrajectorySamples> kept_trajs;
  for (TrajectorySamples& traj : trajectories_) {
    if (contains(traj.trajectory_id)) kept_trajs.push_back(std::move(traj));
  }
  trajectories_ = std::move(kept_trajs);
  write_manifest_csv(manifest_path(dir), manifest_);
}

void write_history_csv(const fs::path& path, const LoopHistory& history) {
  std::string out(kHistoryCsvHeader);
  out.push_back('\n');
  for (const HistoryRow& row : history) {
    out += std::to_string(row.iteration);
    out.push_back(',');
    out += io::format_double(row.force_rmse);
    out.push_back(',');
    out += io::format_double(row.moment_rmse);
    out.push_back(',');
    out += std::to_string(row.pool_size);
    out.push_back(',');
    out += row.ocp_converged ? "1" : "0";
    out.push_back(',');
    out += std::to_string(row.train_epochs_force);
    out.push_back(',');
    out += std::to_string(row.train_epochs_moment);
    out.push_back(',');
    out += io::format_double(row.wall_time);
    out.push_back('\n');
  }
  io::atomic_write(path, out);
}

LoopHistory read_history_csv(const fs::path& path) {
  const auto rows = io::read_csv(path, kHistoryCsvHeader);
  LoopHistory history;
  for (const auto& row : rows) {
    if (row.size() != 8) {
      throw std::runtime_error("history row with " + std::to_string(row.size()) +
                               " fields in " + path.string());
    }
    HistoryRow h;
    h.iteration = std::stoi(row[0]);
    h.force_rmse = io::parse_double(row[1]);
    h.moment_rmse = io::parse_double(row[2]);
    h.pool_size = static_cast<std::size_t>(std::stoull(row[3]));
    h.ocp_converged = row[4] == "1";
    h.train_epochs_force = std::stoi(row[5]);
    h.train_epochs_moment = std::stoi(row[6]);
    h.wall_time = io::parse_double(row[7]);
    history.push_back(h);
  }
  return history;
}

double rmse(const std::vector<Eigen::Vector3d>& predicted,
            const std::vector<Eigen::Vector3d>& truth) {
  if (predicted.size() != truth.size()) {
    throw std::invalid_argument("rmse: length mismatch");
  }
  if (predicted.empty()) {
    throw std::invalid_argument("rmse: empty input");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    for (int c = 0; c < 3; ++c) {
      const double e = predicted[i](c) - truth[i](c);
      sum += e * e;
    }
  }
  return std::sqrt(sum / (3.0 * static_cast<double>(predicted.size())));
}

LoopPaths LoopPaths::rooted_at(const fs::path& root) {
  LoopPaths paths;
  paths.pool_dir = root;
  paths.models_dir = root / "models";
  paths.trajectories_dir = root / "trajectories";
  paths.history_path = root / "history.csv";
  return paths;
}

namespace {

std::string iteration_id(int iteration) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "iter_%04d", iteration);
  return buf;
}

/// Sample-wise train/val split used when the pool holds a single trajectory
/// (the preliminary-only first iteration); nothing can be held out for test.
void split_samples_only(const std::vector<ContactSample>& samples,
                        double val_fraction, std::uint64_t seed,
                        std::vector<ContactSample>& train,
                        std::vector<ContactSample>& val) {
  Rng rng(seed);
  std::vector<std::size_t> order(samples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);
  const std::size_t m = samples.size();
  std::size_t m_train = static_cast<std::size_t>(
      std::floor((1.0 - val_fraction) * static_cast<double>(m)));
  if (m >= 2) m_train = std::clamp<std::size_t>(m_train, 1, m - 1);
  for (std::size_t i = 0; i < m; ++i) {
    (i < m_train ? train : val).push_back(samples[order[i]]);
  }
}

}  // namespace

LoopHistory run_loop(const PipelineConfig& cfg, const LoopPaths& paths, bool resume,
                     const LoopHooks* hooks) {
  cfg.validate();
  fs::create_directories(paths.pool_dir);
  fs::create_directories(paths.models_dir);
  fs::create_directories(paths.trajectories_dir);

  const auto checkpoint = [hooks](int iteration, std::string_view stage) {
    return hooks == nullptr || !hooks->checkpoint || hooks->checkpoint(iteration, stage);
  };

  DataPool pool = DataPool::load(paths.pool_dir);
  if (pool.trajectories().empty()) {
    throw std::runtime_error("loop: data pool is empty; generate the "
                             "preliminary dataset first");
  }

  LoopHistory history;
  if (fs::exists(paths.history_path)) {
    history = read_history_csv(paths.history_path);
    if (!resume && !history.empty()) {
      throw std::runtime_error("loop: history already exists at " +
                               paths.history_path.string() +
                               "; pass resume to continue");
    }
  }
  const int start_iteration = history.empty() ? 1 : history.back().iteration + 1;
  // drop pool entries from iterations that never reached their history commit
  pool.prune_after(paths.pool_dir, start_iteration - 1);

  // warm start from the last committed trajectory, if any
  Trajectory warm;
  bool have_warm = false;
  if (start_iteration > 1) {
    const fs::path prev =
        paths.trajectories_dir / (iteration_id(start_iteration - 1) + ".csv");
    if (fs::exists(prev)) {
      warm = read_trajectory_csv(prev);
      have_warm = true;
    }
  }

  for (int iteration = start_iteration; iteration <= cfg.loop_iterations; ++iteration) {
    const auto t_begin = std::chrono::steady_clock::now();
    const std::uint64_t seed = cfg.base_seed + static_cast<std::uint64_t>(iteration);

    // 1. split the pool and train both nets from fresh seeded initializations
    std::vector<ContactSample> train_samples, val_samples;
    if (pool.trajectories().size() >= 2) {
      SplitSpec split_spec = cfg.split;
      split_spec.seed = seed;
      SplitResult sr = split(pool.trajectories(), split_spec);
      train_samples = std::move(sr.train);
      val_samples = std::move(sr.val);
    } else {
      split_samples_only(pool.trajectories()[0].samples, cfg.split.val_fraction,
                         seed, train_samples, val_samples);
    }

    const Eigen::MatrixXd train_x = feature_matrix(train_samples);
    const Eigen::MatrixXd val_x = feature_matrix(val_samples);
    const auto [norm_mean, norm_std] = fit_normalizer(train_x);

    TrainConfig tc = cfg.train;
    tc.seed = seed;

    MlpModel force_init = MlpModel::make_force_net();
    force_init.norm_mean = norm_mean;
    force_init.norm_std = norm_std;
    {
      Rng rng(seed);
      force_init.init_weights(rng);
    }
    const TrainResult force_tr = train(force_init, train_x, force_matrix(train_samples),
                                       val_x, force_matrix(val_samples), tc);

    MlpModel moment_init = MlpModel::make_moment_net();
    moment_init.norm_mean = norm_mean;
    moment_init.norm_std = norm_std;
    {
      Rng rng(seed);
      moment_init.init_weights(rng);
    }
    const TrainResult moment_tr =
        train(moment_init, train_x, moment_matrix(train_samples), val_x,
              moment_matrix(val_samples), tc);

    // 2. solve the task with the fresh surrogate
    const auto contact = std::make_shared<SurrogateContact>(
        force_tr.model, moment_tr.model, cfg.model);
    const TranscribedOcp ocp(cfg.make_task(contact), cfg.model);
    const auto [trajectory, report] = solve(ocp, have_warm ? &warm : nullptr);

    // 3. replay the first phase in the oracle
    const std::string traj_id = iteration_id(iteration);
    const OracleDataset dataset = replay(trajectory, cfg.bed, cfg.model, traj_id);

    // 4. score the surrogate on the new, unseen samples before appending them
    std::vector<Eigen::Vector3d> force_pred, force_true, moment_pred, moment_true;
    force_pred.reserve(dataset.samples.size());
    for (const ContactSample& s : dataset.samples) {
      const Wrench w = predict_wrench(force_tr.model, moment_tr.model, s.rk);
      force_pred.push_back(w.force);
      moment_pred.push_back(w.moment);
      force_true.push_back(s.force);
      moment_true.push_back(s.moment);
    }
    const double force_rmse = rmse(force_pred, force_true);
    const double moment_rmse = rmse(moment_pred, moment_true);

    // 5. persist: pool increment, then models and trajectory, then the
    // history row as the commit point
    {
      TrajectorySamples traj_samples;
      traj_samples.trajectory_id = traj_id;
      traj_samples.samples = dataset.samples;
      write_sample_csv(DataPool::samples_path(paths.pool_dir, traj_id),
                       traj_samples.samples);
      if (!checkpoint(iteration, "samples")) return history;
      pool.append_committed(traj_samples, Provenance::oracle, iteration);
      write_manifest_csv(DataPool::manifest_path(paths.pool_dir), pool.manifest());
      if (!checkpoint(iteration, "manifest")) return history;
    }

    save_model(paths.models_dir / ("force_" + traj_id + ".json"), force_tr.model);
    save_model(paths.models_dir / ("moment_" + traj_id + ".json"), moment_tr.model);
    save_model(paths.models_dir / "force_latest.json", force_tr.model);
    save_model(paths.models_dir / "moment_latest.json", moment_tr.model);
    write_trajectory_csv(paths.trajectories_dir / (traj_id + ".csv"), trajectory);
    if (!checkpoint(iteration, "artifacts")) return history;

    HistoryRow row;
    row.iteration = iteration;
    row.force_rmse = force_rmse;
    row.moment_rmse = moment_rmse;
    row.pool_size = pool.total_samples();
    row.ocp_converged = report.converged;
    row.train_epochs_force = force_tr.epochs_run;
    row.train_epochs_moment = moment_tr.epochs_run;
    row.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                  t_begin).count();
    history.push_back(row);
    write_history_csv(paths.history_path, history);
    if (!checkpoint(iteration, "history")) return history;

    warm = trajectory;
    have_warm = true;
  }
  return history;
}

std::vector<EvalRow> evaluate_final(const MlpModel& force_model,
                                    const MlpModel& moment_model,
                                    const std::vector<ContactSample>& oracle_samples) {
  std::vector<EvalRow> rows;
  rows.reserve(oracle_samples.size());
  for (const ContactSample& s : oracle_samples) {
    const Wrench w = predict_wrench(force_model, moment_model, s.rk);
    EvalRow row;
    row.time = s.time;
    row.force_true = s.force;
    row.force_pred = w.force;
    row.moment_true = s.moment;
    row.moment_pred = w.moment;
    rows.push_back(row);
  }
  return rows;
}

void write_eval_csv(const fs::path& path, const std::vector<EvalRow>& rows) {
  std::string out(kEvalCsvHeader);
  out.push_back('\n');
  const auto append3 = [&out](const Eigen::Vector3d& v) {
    for (int i = 0; i < 3; ++i) {
      out.push_back(',');
      out += io::format_double(v(i));
    }
  };
  for (const EvalRow& row : rows) {
    out += io::format_double(row.time);
    append3(row.force_true);
    append3(row.force_pred);
    append3(row.moment_true);
    append3(row.moment_pred);
    out.push_back('\n');
  }
  io::atomic_write(path, out);
}

std::vector<EvalRow> read_eval_csv(const fs::path& path) {
  const auto raw = io::read_csv(path, kEvalCsvHeader);
  std::vector<EvalRow> rows;
  for (const auto& fields : raw) {
    if (fields.size() != 13) {
      throw std::runtime_error("eval table row with " +
                               std::to_string(fields.size()) + " fields in " +
                               path.string());
    }
    EvalRow row;
    row.time = io::parse_double(fields[0]);
    const auto read3 = [&fields](int start) {
      return Eigen::Vector3d(io::parse_double(fields[start]),
                             io::parse_double(fields[start + 1]),
                             io::parse_double(fields[start + 2]));
    };
    row.force_true = read3(1);
    row.force_pred = read3(4);
    row.moment_true = read3(7);
    row.moment_pred = read3(10);
    rows.push_back(row);
  }
  return rows;
}

std::pair<double, double> eval_table_rmse(const std::vector<EvalRow>& rows) {
  std::vector<Eigen::Vector3d> fp, ft, mp, mt;
  for (const EvalRow& row : rows) {
    fp.push_back(row.force_pred);
    ft.push_back(row.force_true);
    mp.push_back(row.moment_pred);
    mt.push_back(row.moment_true);
  }
  return {rmse(fp, ft), rmse(mp, mt)};
}

}  // namespace alc
