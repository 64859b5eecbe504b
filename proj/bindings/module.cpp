#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "alcontact/aux_contact.hpp"
#include "alcontact/config.hpp"
#include "alcontact/contact_model.hpp"
#include "alcontact/dataset.hpp"
#include "alcontact/headneck.hpp"
#include "alcontact/kinematics.hpp"
#include "alcontact/loop.hpp"
#include "alcontact/mlp.hpp"
#include "alcontact/ocp.hpp"
#include "alcontact/oracle.hpp"
#include "alcontact/rng.hpp"
#include "alcontact/trajectory.hpp"

namespace py = pybind11;
using namespace alc;

PYBIND11_MODULE(_core, m) {
  m.doc() = "active-learning pipeline for learned headrest contact wrenches";

  py::class_<Frame>(m, "Frame")
      .def(py::init<>())
      .def_readwrite("origin", &Frame::origin)
      .def_readwrite("rotation", &Frame::rotation)
      .def("validate", &Frame::validate);

  py::class_<Twist>(m, "Twist")
      .def(py::init<>())
      .def_readwrite("v", &Twist::v)
      .def_readwrite("omega", &Twist::omega);

  py::class_<RelativeKinematics>(m, "RelativeKinematics")
      .def(py::init<>())
      .def_readwrite("r_rel", &RelativeKinematics::r_rel)
      .def_readwrite("v_rel", &RelativeKinematics::v_rel)
      .def_readwrite("T_rel", &RelativeKinematics::T_rel)
      .def_readwrite("omega_rel", &RelativeKinematics::omega_rel);

  m.def("rotation_about", &rotation_about, py::arg("unit_axis"), py::arg("angle"));
  m.def("relative_kinematics", &relative_kinematics, py::arg("head"),
        py::arg("head_twist"), py::arg("headrest"), py::arg("headrest_twist"));
  m.def("relative_angle", &relative_angle, py::arg("t_rel"));
  m.def("encode_features",
        [](const RelativeKinematics& rk) { return Eigen::VectorXd(encode_features(rk)); },
        py::arg("rk"));
  m.def("feature_jacobian",
        [](const RelativeKinematics& rk) { return Eigen::MatrixXd(feature_jacobian(rk)); },
        py::arg("rk"));

  py::enum_<WrenchFrame>(m, "WrenchFrame")
      .value("headrest", WrenchFrame::headrest)
      .value("world", WrenchFrame::world);

  py::class_<Wrench>(m, "Wrench")
      .def(py::init<>())
      .def_readwrite("force", &Wrench::force)
      .def_readwrite("moment", &Wrench::moment)
      .def_readwrite("frame", &Wrench::frame);

  py::class_<State>(m, "State")
      .def(py::init<>())
      .def(py::init([](double q, double qdot) { return State{q, qdot}; }),
           py::arg("q"), py::arg("qdot"))
      .def_readwrite("q", &State::q)
      .def_readwrite("qdot", &State::qdot);

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init<>())
      .def_readwrite("head_mass", &ModelParams::head_mass)
      .def_readwrite("cog_inertia", &ModelParams::cog_inertia)
      .def_readwrite("cog_offset", &ModelParams::cog_offset)
      .def_readwrite("head_radius", &ModelParams::head_radius)
      .def_readwrite("joint_axis", &ModelParams::joint_axis)
      .def_readwrite("gravity", &ModelParams::gravity)
      .def_readwrite("q_min", &ModelParams::q_min)
      .def_readwrite("q_max", &ModelParams::q_max)
      .def_readwrite("tau_max", &ModelParams::tau_max)
      .def_readwrite("plane_offset", &ModelParams::plane_offset)
      .def_readwrite("headrest", &ModelParams::headrest)
      .def("total_inertia", &ModelParams::total_inertia)
      .def("validate", &ModelParams::validate);

  py::class_<HeadPose>(m, "HeadPose")
      .def_readonly("frame", &HeadPose::frame)
      .def_readonly("lin_jac", &HeadPose::lin_jac)
      .def_readonly("ang_jac", &HeadPose::ang_jac)
      .def("twist", &HeadPose::twist, py::arg("qdot"));

  m.def("head_frame", &head_frame, py::arg("q"), py::arg("params"));
  m.def("gravity_torque", &gravity_torque, py::arg("q"), py::arg("params"));
  m.def("project_contact_wrench", &project_contact_wrench, py::arg("q"),
        py::arg("wrench"), py::arg("params"));
  m.def("forward_dynamics", &forward_dynamics, py::arg("state"), py::arg("tau"),
        py::arg("f_cm"), py::arg("params"));
  m.def("state_relative_kinematics", &state_relative_kinematics, py::arg("q"),
        py::arg("qdot"), py::arg("params"));

  py::enum_<Provenance>(m, "Provenance")
      .value("preliminary", Provenance::preliminary)
      .value("oracle", Provenance::oracle);

  py::class_<ContactSample>(m, "ContactSample")
      .def(py::init<>())
      .def_readwrite("rk", &ContactSample::rk)
      .def_readwrite("force", &ContactSample::force)
      .def_readwrite("moment", &ContactSample::moment)
      .def_readwrite("provenance", &ContactSample::provenance)
      .def_readwrite("trajectory_id", &ContactSample::trajectory_id)
      .def_readwrite("time", &ContactSample::time);

  m.def("write_sample_csv", &write_sample_csv, py::arg("path"), py::arg("samples"));
  m.def("read_sample_csv", &read_sample_csv, py::arg("path"));

  py::class_<MlpModel>(m, "MlpModel")
      .def(py::init<>())
      .def_static("make_force_net", &MlpModel::make_force_net)
      .def_static("make_moment_net", &MlpModel::make_moment_net)
      .def_static("zeros", &MlpModel::zeros, py::arg("dims"))
      .def_readwrite("layer_dims", &MlpModel::layer_dims)
      .def_readwrite("weights", &MlpModel::weights)
      .def_readwrite("biases", &MlpModel::biases)
      .def_readwrite("norm_mean", &MlpModel::norm_mean)
      .def_readwrite("norm_std", &MlpModel::norm_std)
      .def_readwrite("seed", &MlpModel::seed)
      .def("init_weights",
           [](MlpModel& model, std::uint64_t seed) {
             Rng rng(seed);
             model.init_weights(rng);
           },
           py::arg("seed"));

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("learning_rate", &TrainConfig::learning_rate)
      .def_readwrite("batch_size", &TrainConfig::batch_size)
      .def_readwrite("patience", &TrainConfig::patience)
      .def_readwrite("max_epochs", &TrainConfig::max_epochs)
      .def_readwrite("seed", &TrainConfig::seed);

  py::class_<SplitSpec>(m, "SplitSpec")
      .def(py::init<>())
      .def_readwrite("test_fraction", &SplitSpec::test_fraction)
      .def_readwrite("val_fraction", &SplitSpec::val_fraction)
      .def_readwrite("seed", &SplitSpec::seed);

  m.def("mlp_forward", &mlp_forward, py::arg("model"), py::arg("input"));
  m.def("mlp_input_jacobian", &mlp_input_jacobian, py::arg("model"), py::arg("input"));
  m.def("fit_normalizer", &fit_normalizer, py::arg("rows"));
  m.def("predict_wrench", &predict_wrench, py::arg("force_model"),
        py::arg("moment_model"), py::arg("rk"));
  m.def("save_model", &save_model, py::arg("path"), py::arg("model"));
  m.def("load_model", &load_model, py::arg("path"));
  m.def("train",
        [](const MlpModel& init, const Eigen::MatrixXd& tx, const Eigen::MatrixXd& ty,
           const Eigen::MatrixXd& vx, const Eigen::MatrixXd& vy, const TrainConfig& cfg) {
          const TrainResult res = train(init, tx, ty, vx, vy, cfg);
          return py::make_tuple(res.model, res.epochs_run, res.best_val_loss);
        },
        py::arg("model_init"), py::arg("train_x"), py::arg("train_y"), py::arg("val_x"),
        py::arg("val_y"), py::arg("config"));

  py::class_<AuxParams>(m, "AuxParams")
      .def(py::init<>())
      .def_readwrite("stiffness", &AuxParams::stiffness)
      .def_readwrite("damping", &AuxParams::damping)
      .def_readwrite("ref_penetration", &AuxParams::ref_penetration)
      .def_readwrite("r_sp", &AuxParams::r_sp)
      .def_readwrite("normal", &AuxParams::normal);

  py::class_<AuxForceResult>(m, "AuxForceResult")
      .def_readonly("f_scalar", &AuxForceResult::f_scalar)
      .def_readonly("force", &AuxForceResult::force)
      .def_readonly("moment", &AuxForceResult::moment);

  m.def("aux_force",
        py::overload_cast<double, double, const AuxParams&>(&aux_force),
        py::arg("p_mm"), py::arg("pdot_mm_s"), py::arg("params"));

  py::class_<LhsSpec>(m, "LhsSpec")
      .def(py::init<>())
      .def_readwrite("sample_count", &LhsSpec::sample_count)
      .def_readwrite("q_min", &LhsSpec::q_min)
      .def_readwrite("q_max", &LhsSpec::q_max)
      .def_readwrite("qdot_min", &LhsSpec::qdot_min)
      .def_readwrite("qdot_max", &LhsSpec::qdot_max)
      .def_readwrite("seed", &LhsSpec::seed);

  m.def("lhs_sample", &lhs_sample, py::arg("spec"));
  m.def("preliminary_dataset", &preliminary_dataset, py::arg("spec"), py::arg("aux"),
        py::arg("model"), py::arg("trajectory_id") = "prelim");

  py::class_<StressStrainCurve>(m, "StressStrainCurve")
      .def(py::init<>())
      .def_static("low_density_foam", &StressStrainCurve::low_density_foam)
      .def_readwrite("strain", &StressStrainCurve::strain)
      .def_readwrite("stress", &StressStrainCurve::stress)
      .def("__call__", &StressStrainCurve::operator(), py::arg("eps"));

  py::class_<FoamBed>(m, "FoamBed")
      .def(py::init<>())
      .def_readwrite("nodes_u", &FoamBed::nodes_u)
      .def_readwrite("nodes_w", &FoamBed::nodes_w)
      .def_readwrite("patch_u", &FoamBed::patch_u)
      .def_readwrite("patch_w", &FoamBed::patch_w)
      .def_readwrite("thickness", &FoamBed::thickness)
      .def_readwrite("curve", &FoamBed::curve)
      .def_readwrite("damping", &FoamBed::damping)
      .def("node_area", &FoamBed::node_area);

  py::class_<OracleDataset>(m, "OracleDataset")
      .def_readonly("trajectory_id", &OracleDataset::trajectory_id)
      .def_readonly("samples", &OracleDataset::samples);

  m.def("replay", &replay, py::arg("traj"), py::arg("bed"), py::arg("params"),
        py::arg("trajectory_id"));

  py::class_<Trajectory>(m, "Trajectory")
      .def(py::init<>())
      .def_readwrite("times", &Trajectory::times)
      .def_readwrite("q", &Trajectory::q)
      .def_readwrite("qdot", &Trajectory::qdot)
      .def_readwrite("tau", &Trajectory::tau);

  m.def("write_trajectory_csv", &write_trajectory_csv, py::arg("path"), py::arg("traj"));
  m.def("read_trajectory_csv", &read_trajectory_csv, py::arg("path"));

  py::class_<Phase>(m, "Phase")
      .def(py::init<>())
      .def_readwrite("t_start", &Phase::t_start)
      .def_readwrite("t_end", &Phase::t_end)
      .def_readwrite("w_tau", &Phase::w_tau)
      .def_readwrite("w_kin", &Phase::w_kin);

  py::class_<OcpSpec>(m, "OcpSpec")
      .def(py::init<>())
      .def_readwrite("t0", &OcpSpec::t0)
      .def_readwrite("tF", &OcpSpec::tF)
      .def_readwrite("step", &OcpSpec::step)
      .def_readwrite("phases", &OcpSpec::phases)
      .def_readwrite("tau_bound", &OcpSpec::tau_bound)
      .def_readwrite("q_lower", &OcpSpec::q_lower)
      .def_readwrite("q_upper", &OcpSpec::q_upper)
      .def_readwrite("initial_state", &OcpSpec::initial_state)
      .def_readwrite("terminal_rest", &OcpSpec::terminal_rest)
      .def("validate", &OcpSpec::validate);

  m.def("default_task", &default_task);

  py::class_<SolveReport>(m, "SolveReport")
      .def_readonly("converged", &SolveReport::converged)
      .def_readonly("iterations", &SolveReport::iterations)
      .def_readonly("max_constraint_violation", &SolveReport::max_constraint_violation)
      .def_readonly("stationarity_norm", &SolveReport::stationarity_norm)
      .def_readonly("objective_value", &SolveReport::objective_value);

  m.def("solve_task",
        [](const OcpSpec& spec, const ModelParams& params, const MlpModel* force_model,
           const MlpModel* moment_model, const Trajectory* warm_start) {
          OcpSpec task = spec;
          if (force_model != nullptr && moment_model != nullptr) {
            task.contact = std::make_shared<SurrogateContact>(*force_model,
                                                              *moment_model, params);
          }
          const TranscribedOcp ocp(task, params);
          auto [traj, report] = solve(ocp, warm_start);
          return py::make_tuple(traj, report);
        },
        py::arg("spec"), py::arg("params"), py::arg("force_model") = nullptr,
        py::arg("moment_model") = nullptr, py::arg("warm_start") = nullptr,
        "Solve the task, optionally with a surrogate contact model.");

  m.def("rmse", &rmse, py::arg("predicted"), py::arg("truth"));

  py::class_<PipelineConfig>(m, "PipelineConfig")
      .def(py::init<>())
      .def_readwrite("base_seed", &PipelineConfig::base_seed)
      .def_readwrite("model", &PipelineConfig::model)
      .def_readwrite("task", &PipelineConfig::task)
      .def_readwrite("aux", &PipelineConfig::aux)
      .def_readwrite("lhs", &PipelineConfig::lhs)
      .def_readwrite("bed", &PipelineConfig::bed)
      .def_readwrite("train", &PipelineConfig::train)
      .def_readwrite("split", &PipelineConfig::split)
      .def_readwrite("loop_iterations", &PipelineConfig::loop_iterations)
      .def_static("load", &PipelineConfig::load, py::arg("path"))
      .def("save", &PipelineConfig::save, py::arg("path"))
      .def("validate", &PipelineConfig::validate);

  py::class_<LoopPaths>(m, "LoopPaths")
      .def_static("rooted_at", &LoopPaths::rooted_at, py::arg("root"))
      .def_readwrite("pool_dir", &LoopPaths::pool_dir)
      .def_readwrite("models_dir", &LoopPaths::models_dir)
      .def_readwrite("trajectories_dir", &LoopPaths::trajectories_dir)
      .def_readwrite("history_path", &LoopPaths::history_path);

  py::class_<HistoryRow>(m, "HistoryRow")
      .def_readonly("iteration", &HistoryRow::iteration)
      .def_readonly("force_rmse", &HistoryRow::force_rmse)
      .def_readonly("moment_rmse", &HistoryRow::moment_rmse)
      .def_readonly("pool_size", &HistoryRow::pool_size)
      .def_readonly("ocp_converged", &HistoryRow::ocp_converged)
      .def_readonly("train_epochs_force", &HistoryRow::train_epochs_force)
      .def_readonly("train_epochs_moment", &HistoryRow::train_epochs_moment)
      .def_readonly("wall_time", &HistoryRow::wall_time);

  m.def("run_loop",
        [](const PipelineConfig& cfg, const LoopPaths& paths, bool resume) {
          return run_loop(cfg, paths, resume);
        },
        py::arg("config"), py::arg("paths"), py::arg("resume") = false);
  m.def("read_history_csv", &read_history_csv, py::arg("path"));
}
