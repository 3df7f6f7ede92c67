#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "complyctl/admittance.hpp"
#include "complyctl/chain.hpp"
#include "complyctl/ik.hpp"
#include "complyctl/motor.hpp"
#include "complyctl/wrench.hpp"

namespace complyctl {

// One telemetry sample: joint positions/velocities plus either signed
// PWM duties or measured currents (per has_current_sensor).
struct Telemetry {
  double t = 0.0;
  VecX q;
  VecX qdot;
  VecX drive;  // pwm duty or current, per joint
  bool is_current = false;
};

enum class ControlVariant { Full, NoExternalWrench, PositionOnly };

struct ControllerConfig {
  double dt = 0.012;
  double ema_alpha = 0.9;
  EstimatorConfig estimator;
  IkConfig ik;
  StepLimits limits;
  ControlVariant variant = ControlVariant::Full;
  std::vector<int> sites;  // controlled sites, default all

  void validate() const;
};

struct TraceRecord {
  double t = 0.0;
  VecX q;
  VecX q_target;
  std::vector<Pose> x_ref;
  std::vector<Pose> x_des;
  std::vector<Wrench> f_ext;
  std::vector<Wrench> f_cmd;
  double gram_condition = 1.0;
  bool fault = false;
};

// Per-tick pipeline: telemetry -> torque estimation -> wrench
// estimation -> admittance step -> IK -> joint targets. Owned by one
// control thread; commands latch between updates.
class Controller {
 public:
  Controller(ChainModel chain, ControllerConfig config);

  // Initializes task states from FK at q and holds q as the target.
  void reset(const VecX& q);

  // A sub-op failure aborts the tick: the previous target is held and
  // the record carries fault = true.
  TraceRecord run_step(const Telemetry& telemetry,
                       const std::vector<ComplianceCommand>& commands);

  const VecX& joint_targets() const { return q_target_; }
  const ChainModel& chain() const { return chain_; }
  const ControllerConfig& config() const { return config_; }
  const std::vector<TaskState>& task_states() const { return task_states_; }

 private:
  ChainModel chain_;
  ControllerConfig config_;
  TorqueEstimatorState estimator_state_;
  std::vector<TaskState> task_states_;
  VecX q_target_;
  bool initialized_ = false;
};

struct CommandUpdate {
  double t = 0.0;
  std::vector<ComplianceCommand> commands;
};

struct StreamSummary {
  int ticks = 0;
  int faults = 0;
  double median_step_ms = 0.0;
  double p95_step_ms = 0.0;
};

// Ticks at config.dt from the first telemetry timestamp. Stale
// telemetry is reused (zero-order hold); staleness beyond 5 * dt marks
// fault ticks. Commands latch until replaced.
StreamSummary run_stream(Controller& controller,
                         const std::vector<Telemetry>& telemetry,
                         const std::vector<CommandUpdate>& commands,
                         const std::function<void(const TraceRecord&)>& sink);

}  // namespace complyctl
