#pragma once

#include <utility>
#include <vector>

#include "complyctl/chain.hpp"

namespace complyctl {

struct IkConfig {
  double damping = 1e-4;        // DLS mu
  double max_joint_step = 0.2;  // rad, per solve
  double position_weight = 1.0;
  double orientation_weight = 0.5;
  int max_iterations = 50;
  double tolerance = 1e-6;  // weighted task-error norm

  void validate() const;
};

struct IkResult {
  VecX q;
  double residual = 0.0;  // weighted task-error norm at q
  int iterations = 0;
  bool converged = false;
};

// Damped least-squares differential IK over one or more sites.
// q_target always respects joint limits and stays within
// max_joint_step of the seed per component; unreachable targets
// return best effort with residual > tolerance.
IkResult solve_ik(const ChainModel& chain, const VecX& q_seed,
                  const std::vector<std::pair<int, Pose>>& site_targets,
                  const IkConfig& config);

}  // namespace complyctl
