#include "complyctl/admittance.hpp"

#include <cmath>
#include <stdexcept>

namespace complyctl {

namespace {

constexpr double kSymTol = 1e-9;

void check_spsd(const Mat6& m, const char* name) {
  if ((m - m.transpose()).norm() > kSymTol) {
    throw std::runtime_error(std::string("admittance: ") + name +
                             " is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat6> eig(m, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -kSymTol) {
    throw std::runtime_error(std::string("admittance: ") + name +
                             " has a negative eigenvalue");
  }
}

}  // namespace

void ComplianceCommand::validate() const {
  check_spsd(kp, "Kp");
  check_spsd(kd, "Kd");
  if (!(mass > 0)) throw std::runtime_error("admittance: mass must be > 0");
}

Mat6 critical_damping(const Mat6& kp) {
  check_spsd(kp, "Kp");
  Eigen::SelfAdjointEigenSolver<Mat6> eig(kp);
  const Vec6 roots = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return 2.0 * eig.eigenvectors() * roots.asDiagonal() *
         eig.eigenvectors().transpose();
}

Vec6 smd_accel(const TaskState& state, const ComplianceCommand& cmd,
               const Wrench& f_ext) {
  const Vec6 pose_err = pose_error(cmd.x_des, state.x_ref);
  const Vec6 vel_err = cmd.xdot_des - state.xdot_ref;
  return (cmd.kp * pose_err + cmd.kd * vel_err + cmd.f_cmd.vector() +
          f_ext.vector()) /
         cmd.mass;
}

TaskState step(const TaskState& state, const ComplianceCommand& cmd,
               const Wrench& f_ext, double dt, const StepLimits& limits) {
  if (!(dt > 0)) throw std::runtime_error("admittance: dt must be > 0");
  Eigen::SelfAdjointEigenSolver<Mat6> eig(cmd.kp, Eigen::EigenvaluesOnly);
  if (dt * std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff())) > 1.0) {
    throw std::runtime_error(
        "admittance: unstable step, dt * sqrt(lambda_max(Kp)) > 1");
  }

  TaskState next;
  next.xdot_ref = state.xdot_ref + dt * smd_accel(state, cmd, f_ext);

  const double lin = next.xdot_ref.head<3>().norm();
  if (lin > limits.max_linear_velocity) {
    next.xdot_ref.head<3>() *= limits.max_linear_velocity / lin;
  }
  const double ang = next.xdot_ref.tail<3>().norm();
  if (ang > limits.max_angular_velocity) {
    next.xdot_ref.tail<3>() *= limits.max_angular_velocity / ang;
  }

  next.x_ref = integrate_pose(state.x_ref, next.xdot_ref, dt);
  return next;
}

Mat3 stiffness_from_normal(const Vec3& normal, double k_normal,
                           double k_tangential) {
  if (std::abs(normal.norm() - 1.0) > 1e-9) {
    throw std::runtime_error("admittance: surface normal is not unit norm");
  }
  if (k_normal < 0 || k_tangential < 0) {
    throw std::runtime_error("admittance: stiffness gains must be >= 0");
  }
  return k_tangential * Mat3::Identity() +
         (k_normal - k_tangential) * (normal * normal.transpose());
}

}  // namespace complyctl
