#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "complyctl/hybrid.hpp"
#include "support.hpp"

using namespace complyctl;

TEST_CASE("axis-aligned velocity gives a diagonal stiffness") {
  HybridCommand cmd;
  cmd.velocity = Vec3(0.05, 0, 0);
  cmd.k_low = 10.0;
  cmd.k_high = 400.0;
  const Mat3 k = stiffness_from_velocity(cmd);
  Mat3 expected = 10.0 * Mat3::Identity();
  expected(0, 0) = 400.0;
  CHECK((k - expected).norm() < 1e-12);
}

TEST_CASE("spectrum is {k_high, k_low, k_low} for any velocity") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> mag(1e-3, 2.0);
  for (int k = 0; k < 100; ++k) {
    HybridCommand cmd;
    cmd.velocity = mag(rng) * test::random_unit(rng);
    cmd.k_low = 5.0;
    cmd.k_high = 350.0;
    const Mat3 kp = stiffness_from_velocity(cmd);
    const Vec3 eig = Eigen::SelfAdjointEigenSolver<Mat3>(kp).eigenvalues();
    CHECK(std::abs(eig[0] - 5.0) < 1e-12);
    CHECK(std::abs(eig[1] - 5.0) < 1e-12);
    CHECK(std::abs(eig[2] - 350.0) < 1e-12);
    // trace identity: k_high + 2 k_low
    CHECK(kp.trace() == doctest::Approx(360.0).epsilon(1e-14));
    // stiffness is invariant to the velocity magnitude
    HybridCommand scaled = cmd;
    scaled.velocity *= 7.3;
    CHECK((stiffness_from_velocity(scaled) - kp).norm() < 1e-12);
  }
}

TEST_CASE("rotation equivariance") {
  std::mt19937_64 rng(42);
  for (int k = 0; k < 100; ++k) {
    HybridCommand cmd;
    cmd.velocity = test::random_unit(rng) * 0.1;
    cmd.k_low = 8.0;
    cmd.k_high = 250.0;
    const Mat3 r = rotvec_to_matrix(2.0 * test::random_unit(rng));
    HybridCommand rotated = cmd;
    rotated.velocity = r * cmd.velocity;
    const Mat3 lhs = stiffness_from_velocity(rotated);
    const Mat3 rhs = r * stiffness_from_velocity(cmd) * r.transpose();
    CHECK((lhs - rhs).norm() < 1e-12);
  }
}

TEST_CASE("zero velocity falls back to uniform compliance") {
  HybridCommand cmd;
  cmd.velocity = Vec3::Zero();
  cmd.k_low = 12.0;
  cmd.k_high = 300.0;
  const Mat3 k = stiffness_from_velocity(cmd);
  CHECK((k - 12.0 * Mat3::Identity()).norm() == 0.0);
}

TEST_CASE("integrate_velocity advances position only") {
  Pose x;
  x.position = Vec3(0.1, 0.2, 0.3);
  x.orientation = Vec3(0, 0.4, 0);
  const Pose next = integrate_velocity(x, Vec3(0.5, 0, -0.5), 0.02);
  CHECK((next.position - Vec3(0.11, 0.2, 0.29)).norm() < 1e-15);
  CHECK(next.orientation == x.orientation);
}

TEST_CASE("make_compliance_command assembles critically damped gains") {
  HybridCommand cmd;
  cmd.velocity = Vec3(0, 0.1, 0);
  cmd.k_low = 16.0;
  cmd.k_high = 400.0;
  cmd.f_offset.force = Vec3(0, 0, -3.0);
  Pose x_des;
  x_des.position = Vec3(0.3, 0, 0.2);
  const Mat3 rot_k = 25.0 * Mat3::Identity();

  const ComplianceCommand out = make_compliance_command(cmd, x_des, rot_k);
  CHECK((out.kp.topLeftCorner<3, 3>() - stiffness_from_velocity(cmd)).norm() <
        1e-12);
  CHECK((out.kp.bottomRightCorner<3, 3>() - rot_k).norm() < 1e-12);
  CHECK((out.kd * out.kd - 4.0 * out.kp).norm() < 1e-9);
  CHECK((out.f_cmd.force - cmd.f_offset.force).norm() == 0.0);
  CHECK(out.x_des.position == x_des.position);
  CHECK_NOTHROW(out.validate());
}

TEST_CASE("command validation") {
  HybridCommand cmd;
  cmd.k_low = 10.0;
  cmd.k_high = 5.0;  // k_high < k_low
  CHECK_THROWS(cmd.validate());
  cmd.k_low = -1.0;
  CHECK_THROWS(cmd.validate());
  cmd.k_low = 5.0;
  cmd.k_high = 10.0;
  CHECK_NOTHROW(cmd.validate());
}
