#pragma once

#include "complyctl/geometry.hpp"
#include "complyctl/wrench.hpp"

namespace complyctl {

// Per-site compliance command: the inputs of the spring-mass-damper
// reference dynamics. Kp/Kd are symmetric PSD, 6x6, [linear; angular].
struct ComplianceCommand {
  Pose x_des;
  Vec6 xdot_des{Vec6::Zero()};
  Mat6 kp{Mat6::Zero()};
  Mat6 kd{Mat6::Zero()};
  Wrench f_cmd;
  double mass = 1.0;

  void validate() const;
};

// Reference pose and velocity integrated by the admittance loop.
struct TaskState {
  Pose x_ref;
  Vec6 xdot_ref{Vec6::Zero()};
};

// Kd = 2 * Kp^{1/2} via the principal matrix square root.
Mat6 critical_damping(const Mat6& kp);

// xddot = [Kp (x_des - x_ref) + Kd (xdot_des - xdot_ref) + f_cmd + f_ext] / m
Vec6 smd_accel(const TaskState& state, const ComplianceCommand& cmd,
               const Wrench& f_ext);

struct StepLimits {
  double max_linear_velocity = 0.2;   // m/s (free-space default)
  double max_angular_velocity = 2.5;  // rad/s
};

// Semi-implicit Euler: velocity first, then position. The reference
// velocity is clamped to the limits before position integration.
// Rejects dt * sqrt(lambda_max(Kp)) > 1.
TaskState step(const TaskState& state, const ComplianceCommand& cmd,
               const Wrench& f_ext, double dt, const StepLimits& limits = {});

// Kp = k_t I + (k_n - k_t) n n^T; stiff k_n along the surface normal,
// k_t in the tangent plane.
Mat3 stiffness_from_normal(const Vec3& normal, double k_normal,
                           double k_tangential);

}  // namespace complyctl
