#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "alcontact/dataset.hpp"
#include "alcontact/io.hpp"
#include "alcontact/loop.hpp"
#include "alcontact/trajectory.hpp"

using namespace alc;
namespace fs = std::filesystem;

namespace {

std::string binary_path() {
  const char* path = std::getenv("ALCONTACT_BIN");
  REQUIRE_MESSAGE(path != nullptr, "ALCONTACT_BIN must point at the CLI binary");
  return path;
}

int run(const std::string& args) {
  const std::string cmd = binary_path() + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_smoke_config(const fs::path& dir) {
  const fs::path path = dir / "smoke.json";
  std::ofstream out(path);
  out << R"({
  "base_seed": 99,
  "lhs": {"sample_count": 4},
  "bed": {"nodes_u": 8, "nodes_w": 8},
  "train": {"max_epochs": 10},
  "loop": {"iterations": 1}
})";
  return path;
}

}  // namespace

TEST_CASE("help and usage errors") {
  CHECK(run("--help") == 0);
  CHECK(run("prelim --help") == 0);
  CHECK(run("") == 2);                 // missing subcommand
  CHECK(run("prelim") == 2);           // missing --out
  CHECK(run("bogus-subcommand") == 2);
}

TEST_CASE("prelim writes K samples and a manifest row") {
  const fs::path dir = fresh_dir("alcontact_cli_prelim");
  const fs::path cfg = write_smoke_config(dir);
  const fs::path out = dir / "pool";

  CHECK(run("prelim --config " + cfg.string() + " --out " + out.string()) == 0);
  const auto samples = read_sample_csv(out / "samples_prelim.csv");
  CHECK(samples.size() == 4);
  const auto manifest = read_manifest_csv(out / "manifest.csv");
  REQUIRE(manifest.size() == 1);
  CHECK(manifest[0].provenance == Provenance::preliminary);
  CHECK(manifest[0].sample_count == 4);
  CHECK(fs::exists(out / "config_used.json"));

  SUBCASE("refuses a non-empty directory without --force") {
    CHECK(run("prelim --config " + cfg.string() + " --out " + out.string()) == 2);
    CHECK(run("prelim --config " + cfg.string() + " --out " + out.string() +
              " --force") == 0);
  }
  fs::remove_all(dir);
}

TEST_CASE("prelim rejects a broken config") {
  const fs::path dir = fresh_dir("alcontact_cli_badcfg");
  const fs::path cfg = dir / "bad.json";
  {
    std::ofstream out(cfg);
    out << R"({"model": {"unknown_knob": 1}})";
  }
  CHECK(run("prelim --config " + cfg.string() + " --out " + (dir / "pool").string()) ==
        2);
  fs::remove_all(dir);
}

TEST_CASE("solve with contact disabled produces the constant static solution") {
  const fs::path dir = fresh_dir("alcontact_cli_solve");
  const fs::path cfg = dir / "static.json";
  {
    std::ofstream out(cfg);
    // static-feasible task: start at the lower ROM bound, no contact
    out << R"({"task": {"q_init": 0.02, "contact": "none"}})";
  }
  const fs::path traj_path = dir / "traj.csv";
  CHECK(run("solve --config " + cfg.string() + " --out " + traj_path.string()) == 0);
  const Trajectory traj = read_trajectory_csv(traj_path);
  REQUIRE(traj.q.size() == 201);
  for (double q : traj.q) CHECK(std::abs(q - 0.02) < 1e-6);
  fs::remove_all(dir);
}

TEST_CASE("replay covers 401 samples and eval of identical files is zero") {
  const fs::path dir = fresh_dir("alcontact_cli_replay");
  const fs::path cfg = write_smoke_config(dir);

  // build a touching trajectory by hand
  Trajectory traj;
  const int n = 100;
  for (int k = 0; k <= n; ++k) {
    traj.times.push_back(k * 0.01);
    traj.q.push_back(0.2 + 0.2 * k / n);
    traj.qdot.push_back(0.2);
  }
  traj.tau.assign(n, 0.0);
  const fs::path traj_path = dir / "traj.csv";
  write_trajectory_csv(traj_path, traj);

  const fs::path samples_path = dir / "samples.csv";
  CHECK(run("replay --config " + cfg.string() + " --traj " + traj_path.string() +
            " --out " + samples_path.string()) == 0);
  CHECK(read_sample_csv(samples_path).size() == 401);

  CHECK(run("eval --truth " + samples_path.string() + " --pred " +
            samples_path.string()) == 0);

  SUBCASE("replay of a too-short trajectory fails cleanly") {
    Trajectory short_traj = traj;
    short_traj.times.resize(51);
    short_traj.q.resize(51);
    short_traj.qdot.resize(51);
    short_traj.tau.resize(50);
    const fs::path short_path = dir / "short.csv";
    write_trajectory_csv(short_path, short_traj);
    CHECK(run("replay --config " + cfg.string() + " --traj " + short_path.string() +
              " --out " + (dir / "x.csv").string()) == 2);
  }
  fs::remove_all(dir);
}

TEST_CASE("full pipeline through the CLI: prelim, loop, train, eval, export") {
  const fs::path dir = fresh_dir("alcontact_cli_pipeline");
  const fs::path cfg = write_smoke_config(dir);
  const fs::path pool = dir / "pool";

  // the smoke pool is tiny; give the loop a slightly larger preliminary set
  const fs::path cfg2 = dir / "loop.json";
  {
    std::ofstream out(cfg2);
    out << R"({
  "base_seed": 99,
  "lhs": {"sample_count": 120},
  "bed": {"nodes_u": 8, "nodes_w": 8},
  "train": {"max_epochs": 15},
  "loop": {"iterations": 2}
})";
  }
  CHECK(run("prelim --config " + cfg2.string() + " --out " + pool.string()) == 0);
  CHECK(run("loop --config " + cfg2.string() + " --pool " + pool.string()) == 0);
  const LoopHistory history = read_history_csv(pool / "history.csv");
  REQUIRE(history.size() == 2);
  CHECK(history[1].pool_size == 120 + 2 * 401);

  // rerunning without --resume refuses; with --resume it is a no-op
  CHECK(run("loop --config " + cfg2.string() + " --pool " + pool.string()) == 1);
  CHECK(run("loop --config " + cfg2.string() + " --pool " + pool.string() +
            " --resume") == 0);

  // train on the grown pool, then eval the models against the last increment
  const fs::path models = dir / "models";
  CHECK(run("train --config " + cfg2.string() + " --pool " + pool.string() +
            " --out-dir " + models.string()) == 0);
  CHECK(fs::exists(models / "force.json"));
  CHECK(fs::exists(models / "moment.json"));
  CHECK(run("eval --truth " + (pool / "samples_iter_0002.csv").string() +
            " --force-model " + (models / "force.json").string() +
            " --moment-model " + (models / "moment.json").string() + " --out " +
            (dir / "table.csv").string()) == 0);
  CHECK(read_eval_csv(dir / "table.csv").size() == 401);

  // plot-ready exports
  const fs::path plots = dir / "plots";
  CHECK(run("export-plots --run " + pool.string() + " --out " + plots.string()) == 0);
  CHECK(fs::exists(plots / "plot_rmse.csv"));
  CHECK(fs::exists(plots / "plot_trajectory.csv"));
  CHECK(fs::exists(plots / "plot_wrench.csv"));
  const auto rows =
      io::read_csv(plots / "plot_rmse.csv", "iteration,force_rmse,moment_rmse");
  CHECK(rows.size() == 2);

  // an empty pool is a usage error
  const fs::path empty = dir / "empty_pool";
  fs::create_directories(empty);
  CHECK(run("loop --config " + cfg2.string() + " --pool " + empty.string()) == 2);

  fs::remove_all(dir);
}
