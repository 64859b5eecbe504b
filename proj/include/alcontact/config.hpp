#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>

#include <json.hpp>

#include "alcontact/aux_contact.hpp"
#include "alcontact/headneck.hpp"
#include "alcontact/mlp.hpp"
#include "alcontact/ocp.hpp"
#include "alcontact/oracle.hpp"

namespace alc {

enum class ContactKind { surrogate, none };

/// Everything one run needs, loadable from a single JSON document. Unknown
/// keys are rejected; absent keys fall back to the defaults below, which
/// encode the reference task verbatim.
struct PipelineConfig {
  std::uint64_t base_seed = 12345;
  ModelParams model;
  OcpSpec task = default_task();       // contact pointer left unset
  ContactKind task_contact = ContactKind::surrogate;
  AuxParams aux;
  LhsSpec lhs;                         // q range mirrors the model's ROM
  FoamBed bed;
  TrainConfig train;
  SplitSpec split;
  int loop_iterations = 200;

  PipelineConfig();

  /// The task with bounds tied to the model ROM and the given contact model.
  OcpSpec make_task(std::shared_ptr<const JointContactModel> contact) const;

  void validate() const;

  static PipelineConfig from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;

  static PipelineConfig load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
};

}  // namespace alc
