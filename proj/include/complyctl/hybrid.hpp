#pragma once

#include "complyctl/admittance.hpp"

namespace complyctl {

// Hybrid force-velocity command: stiff along the commanded velocity,
// compliant (with a force offset) elsewhere.
struct HybridCommand {
  Vec3 velocity{Vec3::Zero()};  // desired Cartesian velocity, m/s
  double k_low = 0.0;
  double k_high = 0.0;  // 0 <= k_low <= k_high
  Wrench f_offset;

  void validate() const;
};

// K = k_low I + (k_high - k_low) v v^T / ||v||^2.
// ||v|| = 0 returns k_low I (no velocity-controlled direction).
Mat3 stiffness_from_velocity(const HybridCommand& cmd);

// Advance the commanded position by dt * v; orientation unchanged.
Pose integrate_velocity(const Pose& x_des, const Vec3& v, double dt);

// Assemble the compliance command executed by the admittance loop:
// translational Kp from the velocity direction, rotational block as
// configured, Kd critically damped, f_cmd = f_offset.
ComplianceCommand make_compliance_command(const HybridCommand& cmd,
                                          const Pose& x_des,
                                          const Mat3& rotational_stiffness);

}  // namespace complyctl
