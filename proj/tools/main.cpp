#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "alcontact/aux_contact.hpp"
#include "alcontact/config.hpp"
#include "alcontact/contact_model.hpp"
#include "alcontact/io.hpp"
#include "alcontact/loop.hpp"
#include "alcontact/mlp.hpp"
#include "alcontact/ocp.hpp"
#include "alcontact/oracle.hpp"
#include "alcontact/trajectory.hpp"

namespace fs = std::filesystem;
using namespace alc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

/// Thrown for usage/config-level problems (exit code 2).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

PipelineConfig load_config(const std::string& path) {
  if (path.empty()) return PipelineConfig{};
  try {
    return PipelineConfig::load(path);
  } catch (const std::exception& err) {
    throw UsageError(std::string("config: ") + err.what());
  }
}

int cmd_prelim(const std::string& config_path, const std::string& out_dir, bool force) {
  const PipelineConfig cfg = load_config(config_path);
  const fs::path dir(out_dir);
  if (fs::exists(dir) && !fs::is_empty(dir) && !force) {
    throw UsageError("output directory '" + out_dir +
                     "' is not empty; pass --force to write into it");
  }
  fs::create_directories(dir);

  const std::vector<ContactSample> samples =
      preliminary_dataset(cfg.lhs, cfg.aux, cfg.model);
  DataPool pool;
  TrajectorySamples traj;
  traj.trajectory_id = "prelim";
  traj.samples = samples;
  pool.append(dir, std::move(traj), Provenance::preliminary, 0);
  cfg.save(dir / "config_used.json");
  std::cout << "wrote " << samples.size() << " preliminary samples to " << out_dir
            << "\n";
  return kExitOk;
}

int cmd_loop(const std::string& config_path, const std::string& pool_dir,
             std::optional<int> iterations, bool resume) {
  PipelineConfig cfg = load_config(config_path);
  if (iterations) cfg.loop_iterations = *iterations;
  cfg.validate();

  const LoopPaths paths = LoopPaths::rooted_at(pool_dir);
  const DataPool pool = DataPool::load(paths.pool_dir);
  if (pool.trajectories().empty()) {
    throw UsageError("pool '" + pool_dir + "' is empty; run `alcontact prelim` first");
  }
  cfg.save(paths.pool_dir / "config_used.json");

  const LoopHistory history = run_loop(cfg, paths, resume);
  int converged = 0;
  for (const HistoryRow& row : history) converged += row.ocp_converged ? 1 : 0;
  std::cout << "loop finished: " << history.size() << " iterations recorded, "
            << converged << " converged solves, history at "
            << paths.history_path.string() << "\n";
  return kExitOk;
}

std::shared_ptr<const JointContactModel> make_contact(
    const PipelineConfig& cfg, const std::string& force_model_path,
    const std::string& moment_model_path, bool no_contact) {
  if (no_contact || cfg.task_contact == ContactKind::none) return nullptr;
  if (force_model_path.empty() || moment_model_path.empty()) {
    throw UsageError("surrogate contact requested: pass --force-model and "
                     "--moment-model, or --no-contact");
  }
  return std::make_shared<SurrogateContact>(load_model(force_model_path),
                                            load_model(moment_model_path), cfg.model);
}

int cmd_solve(const std::string& config_path, const std::string& out_path,
              const std::string& force_model_path, const std::string& moment_model_path,
              bool no_contact, const std::string& warm_start_path) {
  const PipelineConfig cfg = load_config(config_path);
  const auto contact =
      make_contact(cfg, force_model_path, moment_model_path, no_contact);
  const TranscribedOcp ocp(cfg.make_task(contact), cfg.model);

  Trajectory warm;
  const Trajectory* warm_ptr = nullptr;
  if (!warm_start_path.empty()) {
    warm = read_trajectory_csv(warm_start_path);
    warm_ptr = &warm;
  }
  const auto [trajectory, report] = solve(ocp, warm_ptr);
  write_trajectory_csv(out_path, trajectory);
  std::cout << "solve: converged=" << (report.converged ? 1 : 0)
            << " iterations=" << report.iterations
            << " violation=" << io::format_double(report.max_constraint_violation)
            << " stationarity=" << io::format_double(report.stationarity_norm)
            << " objective=" << io::format_double(report.objective_value)
            << " -> " << out_path << "\n";
  return kExitOk;
}

int cmd_replay(const std::string& config_path, const std::string& traj_path,
               const std::string& out_path, const std::string& traj_id) {
  const PipelineConfig cfg = load_config(config_path);
  const Trajectory traj = read_trajectory_csv(traj_path);
  const OracleDataset dataset = replay(traj, cfg.bed, cfg.model, traj_id);
  write_sample_csv(out_path, dataset.samples);
  std::cout << "replayed " << dataset.samples.size() << " samples to " << out_path
            << "\n";
  return kExitOk;
}

int cmd_train(const std::string& config_path, const std::string& pool_dir,
              const std::string& out_dir, std::optional<std::uint64_t> seed) {
  const PipelineConfig cfg = load_config(config_path);
  const DataPool pool = DataPool::load(pool_dir);
  if (pool.trajectories().empty()) {
    throw UsageError("pool '" + pool_dir + "' is empty");
  }
  if (pool.trajectories().size() < 2) {
    throw UsageError("pool '" + pool_dir + "' holds a single trajectory; the "
                     "trajectory-wise split needs at least two");
  }
  SplitSpec split_spec = cfg.split;
  split_spec.seed = seed.value_or(cfg.base_seed);
  const SplitResult sr = split(pool.trajectories(), split_spec);

  const Eigen::MatrixXd train_x = feature_matrix(sr.train);
  const Eigen::MatrixXd val_x = feature_matrix(sr.val);
  const auto [norm_mean, norm_std] = fit_normalizer(train_x);

  TrainConfig tc = cfg.train;
  tc.seed = split_spec.seed;

  const auto train_net = [&](MlpModel init, const Eigen::MatrixXd& train_y,
                             const Eigen::MatrixXd& val_y) {
    init.norm_mean = norm_mean;
    init.norm_std = norm_std;
    Rng rng(tc.seed);
    init.init_weights(rng);
    return train(init, train_x, train_y, val_x, val_y, tc);
  };
  const TrainResult force_tr = train_net(MlpModel::make_force_net(),
                                         force_matrix(sr.train), force_matrix(sr.val));
  const TrainResult moment_tr = train_net(
      MlpModel::make_moment_net(), moment_matrix(sr.train), moment_matrix(sr.val));

  fs::create_directories(out_dir);
  save_model(fs::path(out_dir) / "force.json", force_tr.model);
  save_model(fs::path(out_dir) / "moment.json", moment_tr.model);
  std::cout << "trained force net (" << force_tr.epochs_run << " epochs, best val mse "
            << io::format_double(force_tr.best_val_loss) << ") and moment net ("
            << moment_tr.epochs_run << " epochs, best val mse "
            << io::format_double(moment_tr.best_val_loss) << "); test trajectories:";
  for (const std::string& id : sr.test_trajectory_ids) std::cout << " " << id;
  std::cout << "\n";
  return kExitOk;
}

int cmd_eval(const std::string& truth_path, const std::string& pred_path,
             const std::string& force_model_path, const std::string& moment_model_path,
             const std::string& out_path) {
  const std::vector<ContactSample> truth = read_sample_csv(truth_path);
  double force_err = 0.0, moment_err = 0.0;

  if (!pred_path.empty()) {
    const std::vector<ContactSample> pred = read_sample_csv(pred_path);
    std::vector<Eigen::Vector3d> fp, ft, mp, mt;
    for (const ContactSample& s : pred) {
      fp.push_back(s.force);
      mp.push_back(s.moment);
    }
    for (const ContactSample& s : truth) {
      ft.push_back(s.force);
      mt.push_back(s.moment);
    }
    force_err = rmse(fp, ft);
    moment_err = rmse(mp, mt);
  } else if (!force_model_path.empty() && !moment_model_path.empty()) {
    const MlpModel force_model = load_model(force_model_path);
    const MlpModel moment_model = load_model(moment_model_path);
    const std::vector<EvalRow> rows = evaluate_final(force_model, moment_model, truth);
    std::tie(force_err, moment_err) = eval_table_rmse(rows);
    if (!out_path.empty()) write_eval_csv(out_path, rows);
  } else {
    throw UsageError("pass either --pred, or --force-model and --moment-model");
  }
  std::cout << "force_rmse=" << io::format_double(force_err)
            << " moment_rmse=" << io::format_double(moment_err) << "\n";
  return kExitOk;
}

int cmd_export_plots(const std::string& run_dir, const std::string& out_dir) {
  const LoopPaths paths = LoopPaths::rooted_at(run_dir);
  if (!fs::exists(paths.history_path)) {
    throw UsageError("no history.csv under '" + run_dir + "'");
  }
  const LoopHistory history = read_history_csv(paths.history_path);
  if (history.empty()) {
    throw UsageError("history at '" + run_dir + "' has no rows");
  }
  fs::create_directories(out_dir);
  const fs::path out(out_dir);

  std::string rmse_csv = "iteration,force_rmse,moment_rmse\n";
  for (const HistoryRow& row : history) {
    rmse_csv += std::to_string(row.iteration) + "," +
                io::format_double(row.force_rmse) + "," +
                io::format_double(row.moment_rmse) + "\n";
  }
  io::atomic_write(out / "plot_rmse.csv", rmse_csv);

  char id[32];
  std::snprintf(id, sizeof(id), "iter_%04d", history.back().iteration);
  const Trajectory traj =
      read_trajectory_csv(paths.trajectories_dir / (std::string(id) + ".csv"));
  std::string traj_csv = "time,q,tau\n";
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    traj_csv += io::format_double(traj.times[k]) + "," + io::format_double(traj.q[k]) +
                "," +
                io::format_double(k < traj.tau.size() ? traj.tau[k] : 0.0) + "\n";
  }
  io::atomic_write(out / "plot_trajectory.csv", traj_csv);

  const MlpModel force_model =
      load_model(paths.models_dir / ("force_" + std::string(id) + ".json"));
  const MlpModel moment_model =
      load_model(paths.models_dir / ("moment_" + std::string(id) + ".json"));
  const std::vector<ContactSample> samples =
      read_sample_csv(DataPool::samples_path(paths.pool_dir, id));
  write_eval_csv(out / "plot_wrench.csv",
                 evaluate_final(force_model, moment_model, samples));

  std::cout << "wrote plot_rmse.csv, plot_trajectory.csv, plot_wrench.csv to "
            << out_dir << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"active-learning pipeline for learned headrest contact wrenches"};
  app.require_subcommand(1);

  std::string config_path, out_path, pool_dir, traj_path, truth_path, pred_path;
  std::string force_model_path, moment_model_path, warm_start_path, run_dir;
  std::string traj_id = "replay";
  bool force = false, resume = false, no_contact = false;
  std::optional<int> iterations;
  std::optional<std::uint64_t> seed;

  CLI::App* prelim = app.add_subcommand(
      "prelim", "generate the preliminary dataset from the auxiliary contact model");
  prelim->add_option("--config", config_path, "pipeline config (JSON)");
  prelim->add_option("--out", out_path, "output pool directory")->required();
  prelim->add_flag("--force", force, "write into a non-empty directory");

  CLI::App* loop = app.add_subcommand("loop", "run the active-learning loop");
  loop->add_option("--config", config_path, "pipeline config (JSON)");
  loop->add_option("--pool", pool_dir, "pool directory (from `prelim`)")->required();
  loop->add_option("--iterations", iterations, "override loop iteration count");
  loop->add_flag("--resume", resume, "continue after the last committed iteration");

  CLI::App* solve_cmd = app.add_subcommand("solve", "solve the optimal-control task");
  solve_cmd->add_option("--config", config_path, "pipeline config (JSON)");
  solve_cmd->add_option("--out", out_path, "output trajectory CSV")->required();
  solve_cmd->add_option("--force-model", force_model_path, "force net model file");
  solve_cmd->add_option("--moment-model", moment_model_path, "moment net model file");
  solve_cmd->add_flag("--no-contact", no_contact, "solve without a contact model");
  solve_cmd->add_option("--warm-start", warm_start_path, "warm-start trajectory CSV");

  CLI::App* replay_cmd =
      app.add_subcommand("replay", "replay a trajectory in the contact oracle");
  replay_cmd->add_option("--config", config_path, "pipeline config (JSON)");
  replay_cmd->add_option("--traj", traj_path, "trajectory CSV")->required();
  replay_cmd->add_option("--out", out_path, "output sample CSV")->required();
  replay_cmd->add_option("--traj-id", traj_id, "trajectory id for the samples");

  CLI::App* train_cmd =
      app.add_subcommand("train", "train the wrench surrogates on a pool");
  train_cmd->add_option("--config", config_path, "pipeline config (JSON)");
  train_cmd->add_option("--pool", pool_dir, "pool directory")->required();
  train_cmd->add_option("--out-dir", out_path, "directory for the model files")
      ->required();
  train_cmd->add_option("--seed", seed, "split/training seed (default: base_seed)");

  CLI::App* eval_cmd =
      app.add_subcommand("eval", "compare predicted and true wrenches (RMSE)");
  eval_cmd->add_option("--truth", truth_path, "ground-truth sample CSV")->required();
  eval_cmd->add_option("--pred", pred_path, "predicted sample CSV");
  eval_cmd->add_option("--force-model", force_model_path, "force net model file");
  eval_cmd->add_option("--moment-model", moment_model_path, "moment net model file");
  eval_cmd->add_option("--out", out_path, "write the predicted-vs-true table here");

  CLI::App* export_cmd =
      app.add_subcommand("export-plots", "export plot-ready CSV tables from a run");
  export_cmd->add_option("--run", run_dir, "loop run directory")->required();
  export_cmd->add_option("--out", out_path, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    if (err.get_exit_code() == 0) return app.exit(err);
    app.exit(err);
    return kExitUsage;
  }

  try {
    if (prelim->parsed()) return cmd_prelim(config_path, out_path, force);
    if (loop->parsed()) return cmd_loop(config_path, pool_dir, iterations, resume);
    if (solve_cmd->parsed()) {
      return cmd_solve(config_path, out_path, force_model_path, moment_model_path,
                       no_contact, warm_start_path);
    }
    if (replay_cmd->parsed()) {
      return cmd_replay(config_path, traj_path, out_path, traj_id);
    }
    if (train_cmd->parsed()) return cmd_train(config_path, pool_dir, out_path, seed);
    if (eval_cmd->parsed()) {
      return cmd_eval(truth_path, pred_path, force_model_path, moment_model_path,
                      out_path);
    }
    if (export_cmd->parsed()) return cmd_export_plots(run_dir, out_path);
  } catch (const UsageError& err) {
    std::cerr << "alcontact: error: " << err.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& err) {
    std::cerr << "alcontact: error: " << err.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& err) {
    std::cerr << "alcontact: error: " << err.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
