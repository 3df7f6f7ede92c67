#pragma once

#include <functional>
#include <map>
#include <random>
#include <vector>

#include "complyctl/chain.hpp"
#include "complyctl/controller.hpp"

namespace complyctl {

// Simulated servo: true motor constants plus the position loop and the
// telemetry corruption applied on read-out.
struct SimMotor {
  MotorParams params;
  double noise_sigma = 0.0;   // multiplicative Gaussian on current
  double quantization = 0.0;  // A per LSB, 0 = off
  double kp_servo = 400.0;    // joint-side position gain, N*m/rad
  double kd_servo = 10.0;     // joint-side velocity gain, N*m*s/rad
  double inertia = 0.05;      // reflected joint inertia, kg*m^2
};

// Penalty-spring plane acting on one site: normal spring force plus
// Coulomb-capped viscous tangential friction.
struct ContactSurface {
  Vec3 point{Vec3::Zero()};
  Vec3 normal{Vec3::UnitZ()};  // unit, pointing out of the surface
  double stiffness = 1000.0;   // N/m
  double friction = 0.0;       // Coulomb coefficient
  double tangential_damping = 50.0;  // N*s/m, capped at friction * |fn|
  int site = 0;
};

// Deterministic ground-truth world. Single-threaded; identical seeds
// give bit-identical runs.
class SimWorld {
 public:
  SimWorld(ChainModel chain, std::vector<SimMotor> motors, uint64_t seed,
           double sim_dt = 1e-3);

  void add_surface(const ContactSurface& surface);
  void set_state(const VecX& q, const VecX& qdot);

  // Extra external force injected at a site (scripted pushes).
  void set_applied_force(int site, const Vec3& force);
  void clear_applied_forces();

  // Advance by dt (sub-stepped at sim_dt) under the servo position
  // loops tracking q_target; returns telemetry at the new time.
  Telemetry sim_step(const VecX& q_target, double dt);

  // Exact external wrench (contact + applied pushes) at the site.
  Wrench true_wrench(int site) const;

  const VecX& q() const { return q_; }
  const VecX& qdot() const { return qdot_; }
  double time() const { return t_; }
  const ChainModel& chain() const { return chain_; }
  double sim_dt() const { return sim_dt_; }

  // Mechanical energy (kinetic + gravitational), for dissipation checks.
  double mechanical_energy() const;

 private:
  VecX external_torques(const VecX& q, const VecX& qdot);

  ChainModel chain_;
  std::vector<SimMotor> motors_;
  std::vector<ContactSurface> surfaces_;
  double sim_dt_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> gauss_{0.0, 1.0};

  double t_ = 0.0;
  VecX q_, qdot_;
  VecX tau_servo_;  // last applied servo joint torques
  std::vector<DriveState> drive_;
  std::map<int, Vec3> applied_force_;
  std::vector<Wrench> site_wrench_;  // last external wrench per site
};

// --- Scenario scripts ------------------------------------------------

struct PressOptions {
  int site = 0;
  Vec3 axis{Vec3::UnitX()};
  double magnitude = 5.0;  // N
  double settle_time = 1.0;
  double ramp_time = 2.0;
  double hold_time = 2.0;
  double release_time = 2.0;
  double task_stiffness = 400.0;  // isotropic translational Kp
  double rot_stiffness = 20.0;
  ControllerConfig control;
};

struct PressResult {
  std::vector<double> t;
  std::vector<Vec3> estimated;
  std::vector<Vec3> truth;
  double mae = 0.0;  // mean absolute per-component error, N
};

// Push-hold-release along an axis while the compliance controller holds
// the initial pose; returns synchronized estimated vs true force traces.
PressResult scenario_press(SimWorld& world, const PressOptions& options);

struct DrawOptions {
  int site = 0;
  ContactSurface surface;  // attached to `site` by the scenario
  std::vector<Vec3> waypoints;  // on the surface plane, world frame
  double speed = 0.03;          // m/s along the waypoint path
  double normal_force = 2.0;    // commanded |f_cmd| into the surface
  double k_normal = 200.0;      // compliant along the normal
  double k_tangential = 400.0;  // stiff in the drawing plane
  double rot_stiffness = 20.0;
  double approach_time = 1.5;
  ControllerConfig control;
};

struct DrawResult {
  std::vector<double> t;
  std::vector<double> normal_force;
  std::vector<Vec3> site_path;
  std::vector<Vec3> desired_path;
  double commanded_force = 0.0;
  double mean_normal_force = 0.0;
  double peak_normal_force = 0.0;
  double mean_force_error = 0.0;  // |f_n - commanded| averaged over contact
  double mean_tangential_error = 0.0;  // m, site vs desired, in-plane
  double max_tangential_error = 0.0;
  double contact_fraction = 0.0;  // ticks with f_n > 0.1 N
  bool contact_loss = false;
  int ticks = 0;
};

// Runs the full controller (or an ablation variant, per
// options.control.variant) along a surface trajectory and reports
// tracking and normal-force statistics.
DrawResult scenario_draw(SimWorld& world, const DrawOptions& options);

}  // namespace complyctl
