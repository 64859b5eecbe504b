#include "alcontact/dataset.hpp"

#include <stdexcept>

#include "alcontact/io.hpp"

namespace alc {

std::string to_string(Provenance p) {
  return p == Provenance::preliminary ? "preliminary" : "oracle";
}

Provenance provenance_from_string(const std::string& s) {
  if (s == "preliminary") return Provenance::preliminary;
  if (s == "oracle") return Provenance::oracle;
  throw std::invalid_argument("unknown provenance: '" + s + "'");
}

std::string sample_csv_content(const std::vector<ContactSample>& samples) {
  std::string out(kSampleCsvHeader);
  out.push_back('\n');
  for (const ContactSample& s : samples) {
    out += s.trajectory_id;
    out.push_back(',');
    out += io::format_double(s.time);
    const auto append3 = [&out](const Eigen::Vector3d& v) {
      for (int i = 0; i < 3; ++i) {
        out.push_back(',');
        out += io::format_double(v(i));
      }
    };
    append3(s.rk.r_rel);
    append3(s.rk.v_rel);
    append3(s.rk.T_rel.col(0));
    append3(s.rk.T_rel.col(1));
    append3(s.rk.omega_rel);
    append3(s.force);
    append3(s.moment);
    out.push_back(',');
    out += to_string(s.provenance);
    out.push_back('\n');
  }
  return out;
}

void write_sample_csv(const std::filesystem::path& path,
                      const std::vector<ContactSample>& samples) {
  io::atomic_write(path, sample_csv_content(samples));
}

std::vector<ContactSample> read_sample_csv(const std::filesystem::path& path) {
  const auto rows = io::read_csv(path, kSampleCsvHeader);
  std::vector<ContactSample> samples;
  samples.reserve(rows.size());
  for (const auto& row : rows) {
    if (row.size() != 24) {
      throw std::runtime_error("sample csv row with " + std::to_string(row.size()) +
                               " fields in " + path.string());
    }
    ContactSample s;
    s.trajectory_id = row[0];
    s.time = io::parse_double(row[1]);
    const auto read3 = [&row](int start) {
      return Eigen::Vector3d(io::parse_double(row[start]),
                             io::parse_double(row[start + 1]),
                             io::parse_double(row[start + 2]));
    };
    s.rk.r_rel = read3(2);
    s.rk.v_rel = read3(5);
    const Eigen::Vector3d col0 = read3(8);
    const Eigen::Vector3d col1 = read3(11);
    s.rk.T_rel.col(0) = col0;
    s.rk.T_rel.col(1) = col1;
    s.rk.T_rel.col(2) = col0.cross(col1);
    s.rk.omega_rel = read3(14);
    s.force = read3(17);
    s.moment = read3(20);
    s.provenance = provenance_from_string(row[23]);
    samples.push_back(std::move(s));
  }
  return samples;
}

}  // namespace alc
