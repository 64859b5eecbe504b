#include <doctest.h>

#include <cmath>
#include <vector>

#include "alcontact/aux_contact.hpp"

using namespace alc;

TEST_CASE("aux_force reference values") {
  const AuxParams params;

  SUBCASE("separated") {
    const AuxForceResult r = aux_force(-1.0, 0.0, params);
    CHECK(r.force.norm() == 0.0);
    CHECK(r.moment.norm() == 0.0);
  }

  SUBCASE("2 mm static penetration gives 24 N along the normal") {
    const AuxForceResult r = aux_force(2.0, 0.0, params);
    CHECK(r.f_scalar == doctest::Approx(24.0).epsilon(1e-12));
    CHECK((r.force - 24.0 * params.normal).norm() < 1e-12);
  }

  SUBCASE("fast withdrawal at small penetration clamps to zero") {
    const AuxForceResult r = aux_force(0.5, -100.0, params);
    CHECK(r.f_scalar ==
          doctest::Approx(1.5 - 10.0 * (1.0 - std::exp(-0.25))).epsilon(1e-12));
    CHECK(r.f_scalar < 0.0);
    CHECK(r.force.norm() == 0.0);
    CHECK(r.moment.norm() == 0.0);
  }
}

TEST_CASE("aux_force never pulls the head in") {
  const AuxParams params;
  for (double p = -2.0; p <= 6.0; p += 0.37) {
    for (double pdot = -400.0; pdot <= 400.0; pdot += 57.0) {
      const AuxForceResult r = aux_force(p, pdot, params);
      CHECK(r.force.dot(params.normal) >= 0.0);
    }
  }
}

TEST_CASE("aux_force vanishes continuously at contact onset") {
  const AuxParams params;
  const AuxForceResult r = aux_force(1e-9, 50.0, params);
  CHECK(r.force.norm() < 1e-8);
}

TEST_CASE("pure stiffness limit is quadratic and monotone") {
  AuxParams params;
  params.damping = 0.0;
  double prev = 0.0;
  for (double p = 0.1; p < 8.0; p += 0.1) {
    const AuxForceResult r = aux_force(p, -123.0, params);
    CHECK(r.f_scalar == doctest::Approx(p * p * params.stiffness).epsilon(1e-14));
    CHECK(r.f_scalar > prev);
    prev = r.f_scalar;
  }
}

TEST_CASE("moment is perpendicular to the force") {
  AuxParams params;
  params.r_sp = Eigen::Vector3d(0.05, 0.02, -0.03);
  const AuxForceResult r = aux_force(3.0, 20.0, params);
  REQUIRE(r.force.norm() > 0.0);
  CHECK(std::abs(r.moment.dot(r.force)) < 1e-12 * r.moment.norm() * r.force.norm());
}

TEST_CASE("lhs_sample puts one sample in every marginal bin") {
  SUBCASE("K = 4 on unit ranges") {
    LhsSpec spec;
    spec.sample_count = 4;
    spec.q_min = 0.0;
    spec.q_max = 1.0;
    spec.qdot_min = 0.0;
    spec.qdot_max = 1.0;
    spec.seed = 5;
    const std::vector<State> states = lhs_sample(spec);
    REQUIRE(states.size() == 4);
    std::vector<int> q_bins(4, 0), v_bins(4, 0);
    for (const State& s : states) {
      q_bins[static_cast<int>(s.q * 4.0)] += 1;
      v_bins[static_cast<int>(s.qdot * 4.0)] += 1;
    }
    for (int b = 0; b < 4; ++b) {
      CHECK(q_bins[b] == 1);
      CHECK(v_bins[b] == 1);
    }
  }

  SUBCASE("K = 2000 on the configured ranges") {
    LhsSpec spec;
    spec.seed = 6;
    const std::vector<State> states = lhs_sample(spec);
    REQUIRE(states.size() == 2000);
    std::vector<int> q_bins(2000, 0), v_bins(2000, 0);
    const double qw = (spec.q_max - spec.q_min) / 2000.0;
    const double vw = (spec.qdot_max - spec.qdot_min) / 2000.0;
    for (const State& s : states) {
      const int qb = std::min(1999, static_cast<int>((s.q - spec.q_min) / qw));
      const int vb = std::min(1999, static_cast<int>((s.qdot - spec.qdot_min) / vw));
      q_bins[qb] += 1;
      v_bins[vb] += 1;
    }
    for (int b = 0; b < 2000; ++b) {
      CHECK(q_bins[b] == 1);
      CHECK(v_bins[b] == 1);
    }
  }

  SUBCASE("same seed gives the identical sample set") {
    LhsSpec spec;
    spec.sample_count = 64;
    spec.seed = 888;
    const std::vector<State> a = lhs_sample(spec);
    const std::vector<State> b = lhs_sample(spec);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].q == b[i].q);
      CHECK(a[i].qdot == b[i].qdot);
    }
  }
}

TEST_CASE("preliminary_dataset") {
  const ModelParams model;
  const AuxParams aux;

  SUBCASE("size K, zero-wrench samples kept") {
    LhsSpec spec;
    spec.sample_count = 100;
    spec.q_min = model.q_min;
    spec.q_max = model.q_max;
    spec.seed = 9;
    const auto samples = preliminary_dataset(spec, aux, model);
    REQUIRE(samples.size() == 100);
    int zero_count = 0;
    for (const ContactSample& s : samples) {
      CHECK(s.provenance == Provenance::preliminary);
      CHECK(s.trajectory_id == "prelim");
      if (s.force.norm() == 0.0) ++zero_count;
    }
    // separated states dominate the ROM, so zero wrenches must appear
    CHECK(zero_count > 0);
  }

  SUBCASE("moment equals lever arm cross force") {
    LhsSpec spec;
    spec.sample_count = 400;
    spec.q_min = model.q_min;
    spec.q_max = model.q_max;
    spec.seed = 10;
    const auto samples = preliminary_dataset(spec, aux, model);
    for (const ContactSample& s : samples) {
      if (s.force.norm() == 0.0) continue;
      // the arm is the rotated r_sp: recover T_rel from the sample itself
      const Eigen::Vector3d arm = s.rk.T_rel * aux.r_sp;
      CHECK((s.moment - arm.cross(s.force)).norm() < 1e-12 * std::max(1.0, s.moment.norm()));
    }
  }

  SUBCASE("wrench values match a scalar re-evaluation of the contact law") {
    LhsSpec spec;
    spec.sample_count = 512;
    spec.q_min = model.q_min;
    spec.q_max = model.q_max;
    spec.seed = 11;
    const auto samples = preliminary_dataset(spec, aux, model);
    const std::vector<State> states = lhs_sample(spec);
    REQUIRE(states.size() == samples.size());
    int contacting = 0;
    for (std::size_t i = 0; i < states.size(); ++i) {
      // independent evaluation in plain scalar arithmetic (default geometry:
      // world frame == headrest-aligned, plane at plane_offset)
      const double q = states[i].q;
      const double qdot = states[i].qdot;
      const double l = model.cog_offset;
      const double cx = l * std::sin(q) + std::cos(q) * aux.r_sp.x() + std::sin(q) * aux.r_sp.z();
      const double vx = qdot * (l * std::cos(q) - std::sin(q) * aux.r_sp.x() +
                                std::cos(q) * aux.r_sp.z());
      const double p_mm = 1e3 * (cx - model.plane_offset);
      const double pdot_mm = 1e3 * vx;
      double f = p_mm * p_mm * aux.stiffness +
                 pdot_mm * aux.damping *
                     (1.0 - std::exp(-std::abs(p_mm) / aux.ref_penetration));
      if (!(p_mm > 0.0 && f > 0.0)) f = 0.0;
      if (f > 0.0) ++contacting;
      CHECK(samples[i].force.x() ==
            doctest::Approx(-f).epsilon(1e-12).scale(std::max(1.0, std::abs(f))));
      CHECK(samples[i].force.y() == 0.0);
      CHECK(samples[i].force.z() == 0.0);
    }
    CHECK(contacting > 0);  // the ROM reaches past the plane
  }
}
