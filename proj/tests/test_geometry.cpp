#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "complyctl/geometry.hpp"
#include "support.hpp"

using namespace complyctl;

TEST_CASE("rotvec round trip is canonical") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> angle(0.0, 3.1);
  for (int k = 0; k < 200; ++k) {
    const Vec3 r = angle(rng) * test::random_unit(rng);
    const Mat3 R = rotvec_to_matrix(r);
    const Vec3 back = matrix_to_rotvec(R);
    CHECK((back - r).norm() < 1e-10);
    CHECK(back.norm() <= 3.1415926535897932 + 1e-12);
  }
}

TEST_CASE("rotvec beyond pi wraps to the canonical representative") {
  const Vec3 axis = Vec3::UnitZ();
  const Vec3 r = 4.0 * axis;  // angle 4 > pi
  const Vec3 canonical = canonicalize_rotvec(r);
  CHECK(canonical.norm() <= 3.1415926535897932 + 1e-12);
  CHECK((rotvec_to_matrix(canonical) - rotvec_to_matrix(r)).norm() < 1e-12);
  // 4 rad about +z equals (4 - 2pi) rad about +z
  CHECK(canonical.z() == doctest::Approx(4.0 - 2 * 3.141592653589793)
                             .epsilon(1e-12));
}

TEST_CASE("small-angle rotvec matches first-order expansion") {
  const Vec3 r(1e-9, -2e-9, 0.5e-9);
  const Mat3 R = rotvec_to_matrix(r);
  Mat3 skew;
  skew << 0, -r.z(), r.y(), r.z(), 0, -r.x(), -r.y(), r.x(), 0;
  CHECK((R - (Mat3::Identity() + skew)).norm() < 1e-17);
  CHECK((matrix_to_rotvec(R) - r).norm() < 1e-15);
}

TEST_CASE("pose_error is zero at identity and inverts composition") {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 100; ++k) {
    Pose a;
    a.position = Vec3::Random();
    a.orientation = 2.5 * test::random_unit(rng);
    CHECK(pose_error(a, a).norm() == doctest::Approx(0.0));

    // error integrates the reference onto the target in one unit step
    Pose b;
    b.position = Vec3::Random();
    b.orientation = 1.2 * test::random_unit(rng);
    const Vec6 e = pose_error(a, b);
    const Pose moved = integrate_pose(b, e, 1.0);
    CHECK((moved.position - a.position).norm() < 1e-12);
    CHECK((pose_rotation(moved) - pose_rotation(a)).norm() < 1e-12);
  }
}

TEST_CASE("integrate_pose composes rotations on the left") {
  Pose p;
  p.orientation = Vec3(0, 0, 1.0);
  Vec6 v = Vec6::Zero();
  v.tail<3>() = Vec3(0.5, 0, 0);
  const Pose next = integrate_pose(p, v, 0.1);
  const Mat3 expected =
      rotvec_to_matrix(Vec3(0.05, 0, 0)) * rotvec_to_matrix(p.orientation);
  CHECK((pose_rotation(next) - expected).norm() < 1e-12);
}

TEST_CASE("integrate_pose position is linear in dt") {
  Pose p;
  p.position = Vec3(1, 2, 3);
  Vec6 v = Vec6::Zero();
  v.head<3>() = Vec3(-0.2, 0.4, 0.0);
  const Pose next = integrate_pose(p, v, 0.25);
  CHECK((next.position - Vec3(0.95, 2.1, 3.0)).norm() < 1e-15);
}
