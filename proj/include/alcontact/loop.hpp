#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "alcontact/config.hpp"
#include "alcontact/dataset.hpp"
#include "alcontact/mlp.hpp"
#include "alcontact/ocp.hpp"
#include "alcontact/oracle.hpp"

namespace alc {

struct ManifestRow {
  std::string trajectory_id;
  Provenance provenance = Provenance::oracle;
  std::size_t sample_count = 0;
  int source_iteration = 0;
};

inline constexpr const char* kManifestCsvHeader =
    "traj_id,provenance,sample_count,source_iteration";

void write_manifest_csv(const std::filesystem::path& path,
                        const std::vector<ManifestRow>& rows);
std::vector<ManifestRow> read_manifest_csv(const std::filesystem::path& path);

/// Append-only collection of contact samples grouped by trajectory, backed
/// by one CSV per trajectory plus a manifest in a pool directory.
class DataPool {
 public:
  static std::filesystem::path manifest_path(const std::filesystem::path& dir);
  static std::filesystem::path samples_path(const std::filesystem::path& dir,
                                            const std::string& trajectory_id);

  /// Loads the manifest and all referenced sample files. A directory
  /// without a manifest loads as an empty pool.
  static DataPool load(const std::filesystem::path& dir);

  const std::vector<TrajectorySamples>& trajectories() const { return trajectories_; }
  const std::vector<ManifestRow>& manifest() const { return manifest_; }
  std::size_t total_samples() const;
  bool contains(const std::string& trajectory_id) const;

  /// Writes the sample file, then commits the manifest row (each step an
  /// atomic replace). Throws if the trajectory id already exists.
  void append(const std::filesystem::path& dir, TrajectorySamples traj,
              Provenance provenance, int source_iteration);

  /// Records an increment whose sample file is already on disk; the caller
  /// persists the manifest afterwards.
  void append_committed(TrajectorySamples traj, Provenance provenance,
                        int source_iteration);

  /// Removes pool entries from iterations after `last_iteration` (orphans of
  /// a torn loop iteration) and rewrites the manifest.
  void prune_after(const std::filesystem::path& dir, int last_iteration);

 private:
  std::vector<TrajectorySamples> trajectories_;
  std::vector<ManifestRow> manifest_;
};

struct HistoryRow {
  int iteration = 0;
  double force_rmse = 0.0;
  double moment_rmse = 0.0;
  std::size_t pool_size = 0;
  bool ocp_converged = false;
  int train_epochs_force = 0;
  int train_epochs_moment = 0;
  double wall_time = 0.0;  // [s]
};

using LoopHistory = std::vector<HistoryRow>;

inline constexpr const char* kHistoryCsvHeader =
    "iteration,force_rmse,moment_rmse,pool_size,ocp_converged,"
    "train_epochs_force,train_epochs_moment,wall_time";

void write_history_csv(const std::filesystem::path& path, const LoopHistory& history);
LoopHistory read_history_csv(const std::filesystem::path& path);

/// Root mean squared error across samples and all three vector components.
double rmse(const std::vector<Eigen::Vector3d>& predicted,
            const std::vector<Eigen::Vector3d>& truth);

/// Run-directory layout used by the loop.
struct LoopPaths {
  std::filesystem::path pool_dir;
  std::filesystem::path models_dir;
  std::filesystem::path trajectories_dir;
  std::filesystem::path history_path;

  /// pool files in `root`, models/ and trajectories/ beneath it,
  /// history.csv next to the manifest.
  static LoopPaths rooted_at(const std::filesystem::path& root);
};

/// Test hook: called after each persistence step with the iteration index
/// and a stage name ("samples", "manifest", "artifacts", "history");
/// returning false aborts the run as if the process had been killed.
struct LoopHooks {
  std::function<bool(int, std::string_view)> checkpoint;
};

/// The active-learning loop: retrain both nets on the pool, solve the task
/// with the fresh surrogate, replay the solution in the oracle, score the
/// surrogate on the unseen samples, append them to the pool, persist.
/// With resume = true, continues after the last committed iteration.
LoopHistory run_loop(const PipelineConfig& cfg, const LoopPaths& paths,
                     bool resume, const LoopHooks* hooks = nullptr);

struct EvalRow {
  double time = 0.0;
  Eigen::Vector3d force_true = Eigen::Vector3d::Zero();
  Eigen::Vector3d force_pred = Eigen::Vector3d::Zero();
  Eigen::Vector3d moment_true = Eigen::Vector3d::Zero();
  Eigen::Vector3d moment_pred = Eigen::Vector3d::Zero();
};

inline constexpr const char* kEvalCsvHeader =
    "time,f_true_x,f_true_y,f_true_z,f_pred_x,f_pred_y,f_pred_z,"
    "m_true_x,m_true_y,m_true_z,m_pred_x,m_pred_y,m_pred_z";

/// Predicted-versus-true wrench table over a replayed trajectory.
std::vector<EvalRow> evaluate_final(const MlpModel& force_model,
                                    const MlpModel& moment_model,
                                    const std::vector<ContactSample>& oracle_samples);

void write_eval_csv(const std::filesystem::path& path, const std::vector<EvalRow>& rows);
std::vector<EvalRow> read_eval_csv(const std::filesystem::path& path);

/// RMSE pair (force, moment) recomputed from an evaluation table.
std::pair<double, double> eval_table_rmse(const std::vector<EvalRow>& rows);

}  // namespace alc
