#include "complyctl/geometry.hpp"

#include <cmath>

namespace complyctl {

Mat3 rotvec_to_matrix(const Vec3& rotvec) {
  const double angle = rotvec.norm();
  if (angle < 1e-12) {
    Mat3 skew;
    skew << 0, -rotvec.z(), rotvec.y(),  //
        rotvec.z(), 0, -rotvec.x(),      //
        -rotvec.y(), rotvec.x(), 0;
    return Mat3::Identity() + skew;
  }
  return Eigen::AngleAxisd(angle, rotvec / angle).toRotationMatrix();
}

Vec3 matrix_to_rotvec(const Mat3& rotation) {
  Eigen::AngleAxisd aa(rotation);
  // AngleAxisd already yields angle in [0, pi].
  return aa.angle() * aa.axis();
}

Vec3 canonicalize_rotvec(const Vec3& rotvec) {
  const double angle = rotvec.norm();
  if (angle <= M_PI) return rotvec;
  const Vec3 axis = rotvec / angle;
  double wrapped = std::fmod(angle, 2.0 * M_PI);
  if (wrapped > M_PI) wrapped -= 2.0 * M_PI;
  return wrapped * axis;
}

Vec6 pose_error(const Pose& target, const Pose& reference) {
  Vec6 error;
  error.head<3>() = target.position - reference.position;
  const Mat3 relative =
      pose_rotation(target) * pose_rotation(reference).transpose();
  error.tail<3>() = matrix_to_rotvec(relative);
  return error;
}

Pose integrate_pose(const Pose& pose, const Vec6& velocity, double dt) {
  Pose next;
  next.position = pose.position + dt * velocity.head<3>();
  const Mat3 delta = rotvec_to_matrix(dt * velocity.tail<3>());
  next.orientation = matrix_to_rotvec(delta * pose_rotation(pose));
  return next;
}

}  // namespace complyctl
