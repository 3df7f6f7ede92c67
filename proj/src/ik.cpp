#include "complyctl/ik.hpp"

#include <cmath>
#include <stdexcept>

namespace complyctl {

void IkConfig::validate() const {
  if (damping < 0) throw std::runtime_error("ik: damping must be >= 0");
  if (!(max_joint_step > 0)) {
    throw std::runtime_error("ik: max_joint_step must be > 0");
  }
  if (position_weight < 0 || orientation_weight < 0) {
    throw std::runtime_error("ik: weights must be >= 0");
  }
  if (max_iterations < 1) throw std::runtime_error("ik: max_iterations >= 1");
  if (!(tolerance > 0)) throw std::runtime_error("ik: tolerance must be > 0");
}

namespace {

VecX clamp_to_limits(const ChainModel& chain, const VecX& q_seed,
                     const VecX& q, double max_step) {
  VecX out = q;
  for (int i = 0; i < chain.joint_count(); ++i) {
    out[i] = std::clamp(out[i], q_seed[i] - max_step, q_seed[i] + max_step);
    out[i] = std::clamp(out[i], chain.joints[i].limit_min,
                        chain.joints[i].limit_max);
  }
  return out;
}

// Weighted stacked task error across sites at configuration q.
VecX task_error(const ChainModel& chain, const VecX& q,
                const std::vector<std::pair<int, Pose>>& targets,
                const IkConfig& cfg) {
  const auto poses = forward_kinematics(chain, q);
  VecX e(6 * static_cast<int>(targets.size()));
  for (size_t s = 0; s < targets.size(); ++s) {
    const Vec6 err = pose_error(targets[s].second, poses[targets[s].first]);
    e.segment<3>(6 * s) = cfg.position_weight * err.head<3>();
    e.segment<3>(6 * s + 3) = cfg.orientation_weight * err.tail<3>();
  }
  return e;
}

}  // namespace

IkResult solve_ik(const ChainModel& chain, const VecX& q_seed,
                  const std::vector<std::pair<int, Pose>>& site_targets,
                  const IkConfig& config) {
  config.validate();
  if (q_seed.size() != chain.joint_count()) {
    throw std::runtime_error("ik: joint vector dimension mismatch");
  }
  for (const auto& [site, target] : site_targets) {
    if (site < 0 || site >= chain.site_count()) {
      throw std::runtime_error("ik: site index out of range");
    }
    if (!target.position.allFinite() || !target.orientation.allFinite()) {
      throw std::runtime_error("ik: non-finite target");
    }
  }

  const int n = chain.joint_count();
  const int m = 6 * static_cast<int>(site_targets.size());

  IkResult result;
  result.q = clamp_to_limits(chain, q_seed, q_seed, config.max_joint_step);
  VecX error = task_error(chain, result.q, site_targets, config);
  result.residual = error.norm();

  Eigen::MatrixXd jac(m, n);
  for (int iter = 0; iter < config.max_iterations; ++iter) {
    if (result.residual < config.tolerance) {
      result.converged = true;
      break;
    }
    for (size_t s = 0; s < site_targets.size(); ++s) {
      const SiteJacobian sj = jacobian(chain, result.q, site_targets[s].first);
      jac.middleRows<3>(6 * s) = config.position_weight * sj.linear;
      jac.middleRows<3>(6 * s + 3) = config.orientation_weight * sj.angular;
    }
    Eigen::MatrixXd gram = jac * jac.transpose();
    gram.diagonal().array() += config.damping;
    const VecX dq = jac.transpose() * gram.ldlt().solve(error);

    // Backtrack on error increase; step clamped to limits each trial.
    bool accepted = false;
    double scale = 1.0;
    for (int halvings = 0; halvings < 8; ++halvings) {
      const VecX q_try = clamp_to_limits(chain, q_seed, result.q + scale * dq,
                                         config.max_joint_step);
      const VecX e_try = task_error(chain, q_try, site_targets, config);
      if (e_try.norm() < result.residual) {
        result.q = q_try;
        error = e_try;
        result.residual = e_try.norm();
        accepted = true;
        break;
      }
      scale *= 0.5;
    }
    ++result.iterations;
    if (!accepted) break;  // stalled, return best effort
  }
  if (result.residual < config.tolerance) result.converged = true;
  return result;
}

}  // namespace complyctl
