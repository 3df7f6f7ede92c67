#include "complyctl/hybrid.hpp"

#include <stdexcept>

namespace complyctl {

void HybridCommand::validate() const {
  if (k_low < 0 || k_low > k_high) {
    throw std::runtime_error("hybrid: require 0 <= k_low <= k_high");
  }
}

Mat3 stiffness_from_velocity(const HybridCommand& cmd) {
  cmd.validate();
  const double sq = cmd.velocity.squaredNorm();
  if (sq == 0.0) return cmd.k_low * Mat3::Identity();
  return cmd.k_low * Mat3::Identity() +
         (cmd.k_high - cmd.k_low) * (cmd.velocity * cmd.velocity.transpose()) /
             sq;
}

Pose integrate_velocity(const Pose& x_des, const Vec3& v, double dt) {
  if (!(dt > 0)) throw std::runtime_error("hybrid: dt must be > 0");
  Pose next = x_des;
  next.position += dt * v;
  return next;
}

ComplianceCommand make_compliance_command(const HybridCommand& cmd,
                                          const Pose& x_des,
                                          const Mat3& rotational_stiffness) {
  ComplianceCommand out;
  out.x_des = x_des;
  out.kp.topLeftCorner<3, 3>() = stiffness_from_velocity(cmd);
  out.kp.bottomRightCorner<3, 3>() = rotational_stiffness;
  out.kd = critical_damping(out.kp);
  out.f_cmd = cmd.f_offset;
  return out;
}

}  // namespace complyctl
