#pragma once

#include <string>

#include "complyctl/sim.hpp"

namespace complyctl {

// A scenario file binds a chain, simulated-servo parameters, a
// controller configuration, and one scripted interaction (press or
// draw). Relative chain paths resolve against the scenario file.
struct Scenario {
  std::string type;  // "press" or "draw"
  ChainModel chain;
  VecX initial_q;
  double sim_dt = 1e-3;
  double noise_sigma = 0.0;
  double quantization = 0.0;
  double servo_kp = 400.0;
  double servo_kd = 12.0;
  double joint_inertia = 0.02;
  ControllerConfig control;
  PressOptions press;
  DrawOptions draw;

  SimWorld make_world(uint64_t seed) const;
};

Scenario load_scenario(const std::string& path);

}  // namespace complyctl
