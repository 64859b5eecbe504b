#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "alcontact/kinematics.hpp"

namespace alc {

enum class Provenance { preliminary, oracle };

std::string to_string(Provenance p);
Provenance provenance_from_string(const std::string& s);

/// One labelled contact configuration: relative kinematics plus the wrench
/// (headrest frame, moment about the head COG) and where it came from.
struct ContactSample {
  RelativeKinematics rk;
  Eigen::Vector3d force = Eigen::Vector3d::Zero();    // [N]
  Eigen::Vector3d moment = Eigen::Vector3d::Zero();   // [Nm]
  Provenance provenance = Provenance::oracle;
  std::string trajectory_id;
  double time = 0.0;  // [s]
};

struct TrajectorySamples {
  std::string trajectory_id;
  std::vector<ContactSample> samples;
};

inline constexpr const char* kSampleCsvHeader =
    "traj_id,time,rx,ry,rz,vx,vy,vz,t11,t21,t31,t12,t22,t32,wx,wy,wz,"
    "fx,fy,fz,mx,my,mz,provenance";

std::string sample_csv_content(const std::vector<ContactSample>& samples);
void write_sample_csv(const std::filesystem::path& path,
                      const std::vector<ContactSample>& samples);

/// Reads a sample CSV. The rotation is stored as the first two columns of
/// T_rel; the third column is reconstructed as their cross product.
std::vector<ContactSample> read_sample_csv(const std::filesystem::path& path);

}  // namespace alc
