#include <doctest.h>

#include <cmath>
#include <cstring>

#include "alcontact/kinematics.hpp"
#include "alcontact/rng.hpp"

using namespace alc;

namespace {

RelativeKinematics random_rk(Rng& rng, double scale = 1.0) {
  RelativeKinematics rk;
  for (int i = 0; i < 3; ++i) {
    rk.r_rel(i) = rng.uniform(-scale, scale);
    rk.v_rel(i) = rng.uniform(-scale, scale);
    rk.omega_rel(i) = rng.uniform(-scale, scale);
  }
  Eigen::Vector3d axis(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                       rng.uniform(-1.0, 1.0));
  if (axis.norm() < 1e-6) axis = Eigen::Vector3d::UnitZ();
  axis.normalize();
  rk.T_rel = rotation_about(axis, rng.uniform(0.0, scale));
  return rk;
}

}  // namespace

TEST_CASE("relative_kinematics identity case") {
  Frame frame;
  const RelativeKinematics rk = relative_kinematics(frame, Twist{}, frame, Twist{});
  CHECK(rk.r_rel.norm() == doctest::Approx(0.0));
  CHECK(rk.v_rel.norm() == doctest::Approx(0.0));
  CHECK((rk.T_rel - Eigen::Matrix3d::Identity()).norm() == doctest::Approx(0.0));
  CHECK(rk.omega_rel.norm() == doctest::Approx(0.0));
}

TEST_CASE("relative_kinematics world-frame passthrough") {
  Frame head;
  head.origin = Eigen::Vector3d(0.3, -0.2, 1.1);
  Twist head_twist;
  head_twist.v = Eigen::Vector3d(0.5, 0.25, -1.0);
  const Frame world;
  const RelativeKinematics rk = relative_kinematics(head, head_twist, world, Twist{});
  CHECK((rk.r_rel - head.origin).norm() < 1e-15);
  CHECK((rk.v_rel - head_twist.v).norm() < 1e-15);
}

TEST_CASE("relative_kinematics rotation about headrest y axis") {
  Frame head;
  head.rotation = rotation_about(Eigen::Vector3d::UnitY(), 0.3);
  const Frame headrest;
  const RelativeKinematics rk = relative_kinematics(head, Twist{}, headrest, Twist{});
  const Eigen::Matrix3d expected = rotation_about(Eigen::Vector3d::UnitY(), 0.3);
  CHECK((rk.T_rel - expected).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(rk.r_rel.norm() == doctest::Approx(0.0));
}

TEST_CASE("relative_kinematics rejects a non-orthonormal rotation") {
  Frame head;
  head.rotation(0, 0) = 2.0;
  CHECK_THROWS_AS(relative_kinematics(head, Twist{}, Frame{}, Twist{}),
                  std::invalid_argument);
}

TEST_CASE("relative_kinematics with a moving, rotated headrest") {
  // hand-checkable: headrest rotated pi/2 about z, translating, spinning
  Frame headrest;
  headrest.rotation = rotation_about(Eigen::Vector3d::UnitZ(), M_PI / 2.0);
  headrest.origin = Eigen::Vector3d(1.0, 0.0, 0.0);
  Twist hr_twist;
  hr_twist.v = Eigen::Vector3d(0.0, 1.0, 0.0);
  hr_twist.omega = Eigen::Vector3d(0.0, 0.0, 2.0);

  Frame head;
  head.origin = Eigen::Vector3d(2.0, 0.0, 0.0);
  Twist head_twist;
  head_twist.v = Eigen::Vector3d(0.0, 3.0, 0.0);

  const RelativeKinematics rk =
      relative_kinematics(head, head_twist, headrest, hr_twist);
  // dp = (1,0,0) in world -> (0,-1,0) in headrest coords
  CHECK((rk.r_rel - Eigen::Vector3d(0.0, -1.0, 0.0)).norm() < 1e-12);
  // v_head - v_hr - omega x dp = (0,3,0)-(0,1,0)-(0,0,2)x(1,0,0) = (0,0,0)
  CHECK(rk.v_rel.norm() < 1e-12);
  CHECK((rk.omega_rel - headrest.rotation.transpose() * Eigen::Vector3d(0, 0, -2.0))
            .norm() < 1e-12);
}

TEST_CASE("relative_angle basics") {
  CHECK(relative_angle(Eigen::Matrix3d::Identity()) == doctest::Approx(0.0));
  const Eigen::Matrix3d r = rotation_about(Eigen::Vector3d::UnitY(), 0.3);
  CHECK(relative_angle(r) == doctest::Approx(0.3).epsilon(1e-12));
  Eigen::Matrix3d half_turn = Eigen::Matrix3d::Identity();
  half_turn(1, 1) = -1.0;
  half_turn(2, 2) = -1.0;
  CHECK(relative_angle(half_turn) == doctest::Approx(M_PI).epsilon(1e-12));
}

TEST_CASE("relative_angle recovers the angle of 1000 random axis-angle rotations") {
  Rng rng(42);
  for (int i = 0; i < 1000; ++i) {
    Eigen::Vector3d axis(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                         rng.uniform(-1.0, 1.0));
    if (axis.norm() < 1e-9) axis = Eigen::Vector3d::UnitX();
    axis.normalize();
    const double theta = rng.uniform(0.0, M_PI);
    const double recovered = relative_angle(rotation_about(axis, theta));
    CHECK(std::abs(recovered - theta) < 1e-9);
  }
}

TEST_CASE("encode_features identity encoding") {
  const RelativeKinematics rk;
  const FeatureVector f = encode_features(rk);
  for (int i = 0; i < kFeatureCount; ++i) {
    if (i == 6 || i == 10) {
      CHECK(f(i) == 1.0);
    } else {
      CHECK(f(i) == 0.0);
    }
  }
}

TEST_CASE("encode_features square terms") {
  RelativeKinematics rk;
  rk.r_rel = Eigen::Vector3d(3.0, 4.0, 0.0);
  CHECK(encode_features(rk)(15) == 25.0);

  RelativeKinematics rot;
  rot.T_rel = rotation_about(Eigen::Vector3d::UnitY(), 0.3);
  CHECK(encode_features(rot)(17) == doctest::Approx(0.09).epsilon(1e-12));
}

TEST_CASE("encode_features is deterministic and pure") {
  Rng rng(7);
  const RelativeKinematics rk = random_rk(rng);
  const FeatureVector a = encode_features(rk);
  const FeatureVector b = encode_features(rk);
  CHECK(std::memcmp(a.data(), b.data(), sizeof(double) * kFeatureCount) == 0);
}

TEST_CASE("third rotation column never enters the features") {
  Rng rng(11);
  RelativeKinematics rk = random_rk(rng);
  const FeatureVector base = encode_features(rk);
  RelativeKinematics tampered = rk;
  tampered.T_rel.col(2) += Eigen::Vector3d(0.5, -0.25, 0.125);
  const FeatureVector poked = encode_features(tampered);
  for (int i = 0; i < kFeatureCount; ++i) {
    CHECK(poked(i) == base(i));
  }
}

TEST_CASE("feature_jacobian structural rows") {
  const RelativeKinematics rk;  // all zero, identity rotation
  const FeatureJacobian jac = feature_jacobian(rk);
  // |r|^2 row vanishes at r = 0
  CHECK(jac.row(15).norm() == 0.0);
  // first entry of r_rel is linear with unit slope
  CHECK(jac(0, 0) == 1.0);
  CHECK(jac.row(0).tail(11).norm() == 0.0);
}

TEST_CASE("feature_jacobian matches central finite differences") {
  Rng rng(1234);
  const double step = 1e-6;
  for (int trial = 0; trial < 100; ++trial) {
    const RelativeKinematics rk = random_rk(rng, 1.0);
    const FeatureJacobian jac = feature_jacobian(rk);

    const auto perturb = [&rk](int dof, double eps) {
      RelativeKinematics p = rk;
      if (dof < 3) {
        p.r_rel(dof) += eps;
      } else if (dof < 6) {
        p.v_rel(dof - 3) += eps;
      } else if (dof < 9) {
        p.omega_rel(dof - 6) += eps;
      } else {
        Eigen::Vector3d theta = Eigen::Vector3d::Zero();
        theta(dof - 9) = eps;
        p.T_rel = rotation_about(theta.normalized(), theta.norm()) * rk.T_rel;
      }
      return p;
    };

    for (int dof = 0; dof < 12; ++dof) {
      const FeatureVector plus = encode_features(perturb(dof, step));
      const FeatureVector minus = encode_features(perturb(dof, -step));
      const FeatureVector fd = (plus - minus) / (2.0 * step);
      for (int row = 0; row < kFeatureCount; ++row) {
        const double scale = std::max(1.0, std::abs(fd(row)));
        CHECK(std::abs(jac(row, dof) - fd(row)) / scale < 1e-5);
      }
    }
  }
}
