#include "complyctl/controller.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace complyctl {

void ControllerConfig::validate() const {
  if (!(dt > 0)) throw std::runtime_error("controller: dt must be > 0");
  if (ema_alpha < 0 || ema_alpha > 1) {
    throw std::runtime_error("controller: ema_alpha outside [0, 1]");
  }
  estimator.validate();
  ik.validate();
}

Controller::Controller(ChainModel chain, ControllerConfig config)
    : chain_(std::move(chain)),
      config_(std::move(config)),
      estimator_state_(chain_.joint_count(), config_.ema_alpha) {
  chain_.validate();
  config_.validate();
  if (config_.sites.empty()) {
    for (int s = 0; s < chain_.site_count(); ++s) config_.sites.push_back(s);
  }
  for (int s : config_.sites) {
    if (s < 0 || s >= chain_.site_count()) {
      throw std::runtime_error("controller: site index out of range");
    }
  }
}

void Controller::reset(const VecX& q) {
  if (q.size() != chain_.joint_count()) {
    throw std::runtime_error("controller: joint vector dimension mismatch");
  }
  const auto poses = forward_kinematics(chain_, q);
  task_states_.assign(config_.sites.size(), TaskState{});
  for (size_t i = 0; i < config_.sites.size(); ++i) {
    task_states_[i].x_ref = poses[config_.sites[i]];
  }
  estimator_state_ = TorqueEstimatorState(chain_.joint_count(),
                                          config_.ema_alpha);
  q_target_ = q;
  initialized_ = true;
}

TraceRecord Controller::run_step(
    const Telemetry& telemetry,
    const std::vector<ComplianceCommand>& commands) {
  if (!initialized_) throw std::runtime_error("controller: reset() first");

  TraceRecord record;
  record.t = telemetry.t;
  record.q = telemetry.q;
  record.q_target = q_target_;
  record.fault = true;  // cleared on a completed tick

  // Work on copies so a faulted tick leaves no partial state behind.
  TorqueEstimatorState est_state = estimator_state_;
  std::vector<TaskState> task_states = task_states_;

  try {
    const int n = chain_.joint_count();
    if (telemetry.q.size() != n || telemetry.qdot.size() != n ||
        telemetry.drive.size() != n) {
      throw std::runtime_error("controller: telemetry dimension mismatch");
    }
    if (!telemetry.q.allFinite() || !telemetry.qdot.allFinite() ||
        !telemetry.drive.allFinite()) {
      throw std::runtime_error("controller: non-finite telemetry");
    }
    if (commands.size() != config_.sites.size()) {
      throw std::runtime_error("controller: one command per controlled site");
    }

    const VecX tau_grav = gravity_torques(chain_, telemetry.q);
    VecX tau_ext(n);
    for (int i = 0; i < n; ++i) {
      const MotorParams& motor = chain_.motor(i);
      const double current =
          telemetry.is_current
              ? telemetry.drive[i]
              : pwm_to_current(telemetry.drive[i], telemetry.qdot[i], motor);
      const LoadTorque load =
          load_torque(current, telemetry.qdot[i], motor, est_state.drive[i]);
      est_state.drive[i] = load.drive;
      tau_ext[i] = external_joint_torque(load.torque, tau_grav[i],
                                         chain_.joints[i].gear_ratio);
    }
    const VecX tau_filtered = ema_step(est_state, tau_ext);

    std::vector<std::pair<int, Pose>> ik_targets;
    record.gram_condition = 1.0;
    for (size_t i = 0; i < config_.sites.size(); ++i) {
      const int site = config_.sites[i];
      const ComplianceCommand& cmd = commands[i];
      const SiteJacobian jac = jacobian(chain_, telemetry.q, site);
      const EstimateReport est =
          estimate(config_.estimator, jac.linear, jac.angular, tau_filtered);
      record.gram_condition =
          std::max(record.gram_condition, est.gram_condition);

      Wrench f_ext = est.wrench;
      if (config_.variant != ControlVariant::Full) f_ext = Wrench{};

      if (config_.variant == ControlVariant::PositionOnly) {
        task_states[i].x_ref = cmd.x_des;
        task_states[i].xdot_ref = cmd.xdot_des;
      } else {
        task_states[i] =
            step(task_states[i], cmd, f_ext, config_.dt, config_.limits);
      }
      record.f_ext.push_back(est.wrench);
      record.f_cmd.push_back(cmd.f_cmd);
      record.x_des.push_back(cmd.x_des);
      record.x_ref.push_back(task_states[i].x_ref);
      ik_targets.emplace_back(site, task_states[i].x_ref);
    }

    const IkResult ik = solve_ik(chain_, q_target_, ik_targets, config_.ik);

    estimator_state_ = std::move(est_state);
    task_states_ = std::move(task_states);
    q_target_ = ik.q;
    record.q_target = q_target_;
    record.fault = false;
  } catch (const std::exception&) {
    record.f_ext.clear();
    record.f_cmd.clear();
    record.x_des.clear();
    record.x_ref.clear();
  }
  return record;
}

StreamSummary run_stream(
    Controller& controller, const std::vector<Telemetry>& telemetry,
    const std::vector<CommandUpdate>& commands,
    const std::function<void(const TraceRecord&)>& sink) {
  if (telemetry.empty()) return {};
  for (size_t i = 1; i < telemetry.size(); ++i) {
    if (telemetry[i].t < telemetry[i - 1].t) {
      throw std::runtime_error("controller: telemetry time not monotone");
    }
  }

  const double dt = controller.config().dt;
  controller.reset(telemetry.front().q);

  StreamSummary summary;
  std::vector<double> step_ms;
  size_t telem_idx = 0;
  size_t cmd_idx = 0;
  std::vector<ComplianceCommand> latched;

  const double t_end = telemetry.back().t;
  for (double t = telemetry.front().t; t <= t_end + 1e-12; t += dt) {
    while (telem_idx + 1 < telemetry.size() &&
           telemetry[telem_idx + 1].t <= t + 1e-12) {
      ++telem_idx;
    }
    while (cmd_idx < commands.size() && commands[cmd_idx].t <= t + 1e-12) {
      latched = commands[cmd_idx].commands;
      ++cmd_idx;
    }
    if (latched.empty()) continue;  // no command yet

    Telemetry sample = telemetry[telem_idx];  // zero-order hold
    const bool stale = (t - sample.t) > 5.0 * dt;
    sample.t = t;

    const auto start = std::chrono::steady_clock::now();
    TraceRecord record = controller.run_step(sample, latched);
    const auto stop = std::chrono::steady_clock::now();
    step_ms.push_back(
        std::chrono::duration<double, std::milli>(stop - start).count());

    if (stale) record.fault = true;
    ++summary.ticks;
    if (record.fault) ++summary.faults;
    if (sink) sink(record);
  }

  if (!step_ms.empty()) {
    std::sort(step_ms.begin(), step_ms.end());
    summary.median_step_ms = step_ms[step_ms.size() / 2];
    summary.p95_step_ms = step_ms[(step_ms.size() * 95) / 100];
  }
  return summary;
}

}  // namespace complyctl
