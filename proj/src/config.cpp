#include "alcontact/config.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include "alcontact/io.hpp"

namespace alc {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& context) {
  if (!obj.is_object()) {
    throw std::invalid_argument("config: " + context + " must be an object");
  }
  for (const auto& item : obj.items()) {
    if (allowed.find(item.key()) == allowed.end()) {
      throw std::invalid_argument("config: unknown key '" + item.key() + "' in " +
                                  context);
    }
  }
}

template <class T>
void read_to(const json& obj, const char* key, T& target) {
  if (obj.contains(key)) target = obj.at(key).get<T>();
}

Eigen::Vector3d read_vec3(const json& arr, const std::string& context) {
  if (!arr.is_array() || arr.size() != 3) {
    throw std::invalid_argument("config: " + context + " must be a 3-array");
  }
  return Eigen::Vector3d(arr[0].get<double>(), arr[1].get<double>(),
                         arr[2].get<double>());
}

json vec3_to_json(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

}  // namespace

PipelineConfig::PipelineConfig() {
  lhs.q_min = model.q_min;
  lhs.q_max = model.q_max;
}

OcpSpec PipelineConfig::make_task(std::shared_ptr<const JointContactModel> contact) const {
  OcpSpec spec = task;
  spec.q_lower = model.q_min;
  spec.q_upper = model.q_max;
  spec.contact = std::move(contact);
  return spec;
}

void PipelineConfig::validate() const {
  model.validate();
  make_task(nullptr).validate();
  aux.validate();
  lhs.validate();
  bed.validate();
  if (train.learning_rate <= 0.0 || train.batch_size <= 0 || train.patience <= 0 ||
      train.max_epochs <= 0) {
    throw std::invalid_argument("config: train values must be positive");
  }
  if (!(split.test_fraction > 0.0 && split.test_fraction < 1.0) ||
      !(split.val_fraction > 0.0 && split.val_fraction < 1.0)) {
    throw std::invalid_argument("config: split fractions must lie in (0, 1)");
  }
  if (loop_iterations < 1) {
    throw std::invalid_argument("config: loop iterations must be >= 1");
  }
}

PipelineConfig PipelineConfig::from_json(const json& doc) {
  check_keys(doc, {"base_seed", "model", "task", "aux", "lhs", "bed", "train",
                   "split", "loop"},
             "top level");
  PipelineConfig cfg;
  read_to(doc, "base_seed", cfg.base_seed);

  bool plane_offset_given = false;
  bool headrest_given = false;
  bool r_sp_given = false;

  if (doc.contains("model")) {
    const json& m = doc.at("model");
    check_keys(m,
               {"head_mass", "cog_inertia", "cog_offset", "head_radius",
                "joint_axis", "gravity", "q_min", "q_max", "tau_max",
                "plane_offset", "headrest_origin"},
               "model");
    read_to(m, "head_mass", cfg.model.head_mass);
    read_to(m, "cog_inertia", cfg.model.cog_inertia);
    read_to(m, "cog_offset", cfg.model.cog_offset);
    read_to(m, "head_radius", cfg.model.head_radius);
    if (m.contains("joint_axis")) {
      cfg.model.joint_axis = read_vec3(m.at("joint_axis"), "model.joint_axis");
    }
    read_to(m, "gravity", cfg.model.gravity);
    read_to(m, "q_min", cfg.model.q_min);
    read_to(m, "q_max", cfg.model.q_max);
    read_to(m, "tau_max", cfg.model.tau_max);
    if (m.contains("plane_offset")) {
      cfg.model.plane_offset = m.at("plane_offset").get<double>();
      plane_offset_given = true;
    }
    if (m.contains("headrest_origin")) {
      cfg.model.headrest.origin = read_vec3(m.at("headrest_origin"), "model.headrest_origin");
      headrest_given = true;
    }
  }
  // geometry defaults follow the (possibly overridden) head dimensions
  if (!plane_offset_given) {
    cfg.model.plane_offset =
        ModelParams::default_plane_offset(cfg.model.cog_offset, cfg.model.head_radius);
  }
  if (!headrest_given) {
    cfg.model.headrest = ModelParams::default_headrest(cfg.model.cog_offset,
                                                       cfg.model.head_radius);
    cfg.model.headrest.origin.x() = cfg.model.plane_offset;
  } else if (plane_offset_given &&
             std::abs(cfg.model.headrest.origin.x() - cfg.model.plane_offset) > 1e-12) {
    throw std::invalid_argument("config: headrest_origin.x must equal plane_offset");
  }

  if (doc.contains("task")) {
    const json& t = doc.at("task");
    check_keys(t,
               {"t0", "tF", "step", "phases", "tau_bound", "q_init",
                "terminal_rest", "contact"},
               "task");
    read_to(t, "t0", cfg.task.t0);
    read_to(t, "tF", cfg.task.tF);
    read_to(t, "step", cfg.task.step);
    if (t.contains("phases")) {
      cfg.task.phases.clear();
      for (const json& p : t.at("phases")) {
        check_keys(p, {"t_start", "t_end", "w_tau", "w_kin"}, "task.phases[]");
        Phase phase;
        phase.t_start = p.at("t_start").get<double>();
        phase.t_end = p.at("t_end").get<double>();
        phase.w_tau = p.at("w_tau").get<double>();
        phase.w_kin = p.at("w_kin").get<double>();
        cfg.task.phases.push_back(phase);
      }
    }
    read_to(t, "tau_bound", cfg.task.tau_bound);
    read_to(t, "q_init", cfg.task.initial_state.q);
    read_to(t, "terminal_rest", cfg.task.terminal_rest);
    if (t.contains("contact")) {
      const std::string kind = t.at("contact").get<std::string>();
      if (kind == "surrogate") {
        cfg.task_contact = ContactKind::surrogate;
      } else if (kind == "none") {
        cfg.task_contact = ContactKind::none;
      } else {
        throw std::invalid_argument("config: task.contact must be 'surrogate' or 'none'");
      }
    }
  }

  if (doc.contains("aux")) {
    const json& a = doc.at("aux");
    check_keys(a, {"stiffness", "damping", "ref_penetration", "r_sp", "normal"}, "aux");
    read_to(a, "stiffness", cfg.aux.stiffness);
    read_to(a, "damping", cfg.aux.damping);
    read_to(a, "ref_penetration", cfg.aux.ref_penetration);
    if (a.contains("r_sp")) {
      cfg.aux.r_sp = read_vec3(a.at("r_sp"), "aux.r_sp");
      r_sp_given = true;
    }
    if (a.contains("normal")) cfg.aux.normal = read_vec3(a.at("normal"), "aux.normal");
  }
  if (!r_sp_given) {
    cfg.aux.r_sp = AuxParams::default_contact_point(cfg.model.head_radius);
  }

  if (doc.contains("lhs")) {
    const json& l = doc.at("lhs");
    check_keys(l, {"sample_count", "qdot_min", "qdot_max"}, "lhs");
    read_to(l, "sample_count", cfg.lhs.sample_count);
    read_to(l, "qdot_min", cfg.lhs.qdot_min);
    read_to(l, "qdot_max", cfg.lhs.qdot_max);
  }
  cfg.lhs.q_min = cfg.model.q_min;
  cfg.lhs.q_max = cfg.model.q_max;
  cfg.lhs.seed = cfg.base_seed;

  if (doc.contains("bed")) {
    const json& b = doc.at("bed");
    check_keys(b,
               {"nodes_u", "nodes_w", "patch_u", "patch_w", "thickness",
                "damping", "stress_strain"},
               "bed");
    read_to(b, "nodes_u", cfg.bed.nodes_u);
    read_to(b, "nodes_w", cfg.bed.nodes_w);
    read_to(b, "patch_u", cfg.bed.patch_u);
    read_to(b, "patch_w", cfg.bed.patch_w);
    read_to(b, "thickness", cfg.bed.thickness);
    read_to(b, "damping", cfg.bed.damping);
    if (b.contains("stress_strain")) {
      cfg.bed.curve.strain.clear();
      cfg.bed.curve.stress.clear();
      for (const json& knot : b.at("stress_strain")) {
        if (!knot.is_array() || knot.size() != 2) {
          throw std::invalid_argument("config: bed.stress_strain knots must be "
                                      "[strain, stress] pairs");
        }
        cfg.bed.curve.strain.push_back(knot[0].get<double>());
        cfg.bed.curve.stress.push_back(knot[1].get<double>());
      }
    }
  }

  if (doc.contains("train")) {
    const json& t = doc.at("train");
    check_keys(t, {"learning_rate", "batch_size", "patience", "max_epochs"}, "train");
    read_to(t, "learning_rate", cfg.train.learning_rate);
    read_to(t, "batch_size", cfg.train.batch_size);
    read_to(t, "patience", cfg.train.patience);
    read_to(t, "max_epochs", cfg.train.max_epochs);
  }

  if (doc.contains("split")) {
    const json& s = doc.at("split");
    check_keys(s, {"test_fraction", "val_fraction"}, "split");
    read_to(s, "test_fraction", cfg.split.test_fraction);
    read_to(s, "val_fraction", cfg.split.val_fraction);
  }

  if (doc.contains("loop")) {
    const json& l = doc.at("loop");
    check_keys(l, {"iterations"}, "loop");
    read_to(l, "iterations", cfg.loop_iterations);
  }

  cfg.validate();
  return cfg;
}

nlohmann::json PipelineConfig::to_json() const {
  json doc;
  doc["base_seed"] = base_seed;
  doc["model"] = {{"head_mass", model.head_mass},
                  {"cog_inertia", model.cog_inertia},
                  {"cog_offset", model.cog_offset},
                  {"head_radius", model.head_radius},
                  {"joint_axis", vec3_to_json(model.joint_axis)},
                  {"gravity", model.gravity},
                  {"q_min", model.q_min},
                  {"q_max", model.q_max},
                  {"tau_max", model.tau_max},
                  {"plane_offset", model.plane_offset},
                  {"headrest_origin", vec3_to_json(model.headrest.origin)}};
  json phases = json::array();
  for (const Phase& p : task.phases) {
    phases.push_back({{"t_start", p.t_start},
                      {"t_end", p.t_end},
                      {"w_tau", p.w_tau},
                      {"w_kin", p.w_kin}});
  }
  doc["task"] = {{"t0", task.t0},
                 {"tF", task.tF},
                 {"step", task.step},
                 {"phases", phases},
                 {"tau_bound", task.tau_bound},
                 {"q_init", task.initial_state.q},
                 {"terminal_rest", task.terminal_rest},
                 {"contact", task_contact == ContactKind::surrogate ? "surrogate" : "none"}};
  doc["aux"] = {{"stiffness", aux.stiffness},
                {"damping", aux.damping},
                {"ref_penetration", aux.ref_penetration},
                {"r_sp", vec3_to_json(aux.r_sp)},
                {"normal", vec3_to_json(aux.normal)}};
  doc["lhs"] = {{"sample_count", lhs.sample_count},
                {"qdot_min", lhs.qdot_min},
                {"qdot_max", lhs.qdot_max}};
  json knots = json::array();
  for (std::size_t i = 0; i < bed.curve.strain.size(); ++i) {
    knots.push_back(json::array({bed.curve.strain[i], bed.curve.stress[i]}));
  }
  doc["bed"] = {{"nodes_u", bed.nodes_u},     {"nodes_w", bed.nodes_w},
                {"patch_u", bed.patch_u},     {"patch_w", bed.patch_w},
                {"thickness", bed.thickness}, {"damping", bed.damping},
                {"stress_strain", knots}};
  doc["train"] = {{"learning_rate", train.learning_rate},
                  {"batch_size", train.batch_size},
                  {"patience", train.patience},
                  {"max_epochs", train.max_epochs}};
  doc["split"] = {{"test_fraction", split.test_fraction},
                  {"val_fraction", split.val_fraction}};
  doc["loop"] = {{"iterations", loop_iterations}};
  return doc;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(io::read_file(path));
  } catch (const json::parse_error& err) {
    throw std::invalid_argument("config: cannot parse " + path.string() + ": " +
                                err.what());
  }
  return from_json(doc);
}

void PipelineConfig::save(const std::filesystem::path& path) const {
  io::atomic_write(path, to_json().dump(2) + "\n");
}

}  // namespace alc
