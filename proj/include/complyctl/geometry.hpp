#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

namespace complyctl {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using VecX = Eigen::VectorXd;
using Mat3X = Eigen::Matrix<double, 3, Eigen::Dynamic>;
using Quat = Eigen::Quaterniond;

// Task-space pose: position in meters, orientation as a canonical
// rotation vector (magnitude <= pi).
struct Pose {
  Vec3 position{Vec3::Zero()};
  Vec3 orientation{Vec3::Zero()};
};

Mat3 rotvec_to_matrix(const Vec3& rotvec);

// Canonical rotation vector of R, magnitude in [0, pi].
Vec3 matrix_to_rotvec(const Mat3& rotation);

Vec3 canonicalize_rotvec(const Vec3& rotvec);

inline Mat3 pose_rotation(const Pose& pose) {
  return rotvec_to_matrix(pose.orientation);
}

// 6-vector error target (-) reference: plain difference on position,
// rotation vector of the relative rotation on orientation.
Vec6 pose_error(const Pose& target, const Pose& reference);

// Advance a pose by dt * velocity; linear part integrates
// component-wise, angular part composes exp(dt * omega) onto the
// current rotation.
Pose integrate_pose(const Pose& pose, const Vec6& velocity, double dt);

}  // namespace complyctl
