#include "complyctl/sim.hpp"

#include <cmath>
#include <stdexcept>

#include "complyctl/admittance.hpp"

namespace complyctl {

SimWorld::SimWorld(ChainModel chain, std::vector<SimMotor> motors,
                   uint64_t seed, double sim_dt)
    : chain_(std::move(chain)),
      motors_(std::move(motors)),
      sim_dt_(sim_dt),
      rng_(seed) {
  chain_.validate();
  if (static_cast<int>(motors_.size()) != chain_.joint_count()) {
    throw std::runtime_error("sim: one SimMotor per joint");
  }
  if (!(sim_dt_ > 0)) throw std::runtime_error("sim: sim_dt must be > 0");
  q_ = VecX::Zero(chain_.joint_count());
  qdot_ = VecX::Zero(chain_.joint_count());
  tau_servo_ = VecX::Zero(chain_.joint_count());
  drive_.assign(chain_.joints.size(), DriveState{});
  site_wrench_.assign(chain_.sites.size(), Wrench{});
}

void SimWorld::add_surface(const ContactSurface& surface) {
  if (std::abs(surface.normal.norm() - 1.0) > 1e-9) {
    throw std::runtime_error("sim: surface normal is not unit norm");
  }
  if (!(surface.stiffness > 0) || surface.friction < 0) {
    throw std::runtime_error("sim: bad surface parameters");
  }
  if (surface.site < 0 || surface.site >= chain_.site_count()) {
    throw std::runtime_error("sim: surface site out of range");
  }
  surfaces_.push_back(surface);
}

void SimWorld::set_state(const VecX& q, const VecX& qdot) {
  if (q.size() != chain_.joint_count() || qdot.size() != chain_.joint_count()) {
    throw std::runtime_error("sim: state dimension mismatch");
  }
  q_ = q;
  qdot_ = qdot;
  external_torques(q_, qdot_);  // refresh site wrenches
}

void SimWorld::set_applied_force(int site, const Vec3& force) {
  if (site < 0 || site >= chain_.site_count()) {
    throw std::runtime_error("sim: site out of range");
  }
  applied_force_[site] = force;
}

void SimWorld::clear_applied_forces() { applied_force_.clear(); }

VecX SimWorld::external_torques(const VecX& q, const VecX& qdot) {
  VecX tau = VecX::Zero(chain_.joint_count());
  for (Wrench& w : site_wrench_) w = Wrench{};

  for (const ContactSurface& surface : surfaces_) {
    const SiteJacobian jac = jacobian(chain_, q, surface.site);
    const Vec3 p = site_pose(chain_, q, surface.site).position;
    const double depth = (p - surface.point).dot(surface.normal);
    if (depth >= 0) continue;  // not penetrating
    Vec3 force = -surface.stiffness * depth * surface.normal;
    const Vec3 v = jac.linear * qdot;
    const Vec3 v_tan = v - v.dot(surface.normal) * surface.normal;
    Vec3 f_tan = -surface.tangential_damping * v_tan;
    const double cap = surface.friction * force.norm();
    if (f_tan.norm() > cap) {
      f_tan = (cap > 0) ? Vec3(f_tan * (cap / f_tan.norm())) : Vec3::Zero();
    }
    force += f_tan;
    site_wrench_[surface.site].force += force;
    tau += jac.linear.transpose() * force;
  }

  for (const auto& [site, force] : applied_force_) {
    const SiteJacobian jac = jacobian(chain_, q, site);
    site_wrench_[site].force += force;
    tau += jac.linear.transpose() * force;
  }
  return tau;
}

Telemetry SimWorld::sim_step(const VecX& q_target, double dt) {
  if (q_target.size() != chain_.joint_count()) {
    throw std::runtime_error("sim: target dimension mismatch");
  }
  if (sim_dt_ > dt / 4.0 + 1e-12) {
    throw std::runtime_error("sim: sim_dt must be <= control dt / 4");
  }
  const int substeps = std::max(4, static_cast<int>(std::round(dt / sim_dt_)));
  const double h = dt / substeps;

  for (int s = 0; s < substeps; ++s) {
    tau_servo_ = VecX::Zero(chain_.joint_count());
    for (int i = 0; i < chain_.joint_count(); ++i) {
      tau_servo_[i] = motors_[i].kp_servo * (q_target[i] - q_[i]) -
                      motors_[i].kd_servo * qdot_[i];
    }
    const VecX tau_ext = external_torques(q_, qdot_);
    const VecX tau_grav_applied = -gravity_torques(chain_, q_);
    VecX qddot(chain_.joint_count());
    for (int i = 0; i < chain_.joint_count(); ++i) {
      qddot[i] = (tau_servo_[i] + tau_grav_applied[i] + tau_ext[i]) /
                 motors_[i].inertia;
    }
    qdot_ += h * qddot;
    q_ += h * qdot_;
  }
  t_ += dt;
  external_torques(q_, qdot_);  // site wrenches at the new state

  // Read-out: servo torque at the new state, inverted through the
  // drive-train model (Eqs. of motor_model run in reverse) plus noise.
  Telemetry telemetry;
  telemetry.t = t_;
  telemetry.q = q_;
  telemetry.qdot = qdot_;
  telemetry.drive = VecX::Zero(chain_.joint_count());
  // Telemetry kind follows the first motor; mixed chains are not modeled.
  telemetry.is_current = motors_[0].params.has_current_sensor;
  for (int i = 0; i < chain_.joint_count(); ++i) {
    const MotorParams& params = motors_[i].params;
    const double tau_servo =
        motors_[i].kp_servo * (q_target[i] - q_[i]) -
        motors_[i].kd_servo * qdot_[i];
    const double tau_load = tau_servo / chain_.joints[i].gear_ratio;
    if (std::abs(qdot_[i]) > params.eps_vel) {
      const double power = tau_load * qdot_[i];
      if (power != 0.0) drive_[i].d = (power > 0.0) ? 1.0 : -1.0;
    }
    const double tau_w =
        (drive_[i].d > 0.0) ? tau_load / params.eta : tau_load * params.eta;
    double current = tau_w / params.kt;
    if (motors_[i].noise_sigma > 0) {
      current *= 1.0 + motors_[i].noise_sigma * gauss_(rng_);
    }
    if (motors_[i].quantization > 0) {
      current = std::round(current / motors_[i].quantization) *
                motors_[i].quantization;
    }
    if (telemetry.is_current) {
      telemetry.drive[i] = current;
    } else {
      double pwm = (current * params.rw + qdot_[i] / params.kv) / params.vbus;
      telemetry.drive[i] = std::clamp(pwm, -1.0, 1.0);
    }
  }
  return telemetry;
}

Wrench SimWorld::true_wrench(int site) const {
  if (site < 0 || site >= chain_.site_count()) {
    throw std::runtime_error("sim: site out of range");
  }
  return site_wrench_[site];
}

double SimWorld::mechanical_energy() const {
  double energy = 0.0;
  for (int i = 0; i < chain_.joint_count(); ++i) {
    energy += 0.5 * motors_[i].inertia * qdot_[i] * qdot_[i];
  }
  const auto transforms = joint_transforms(chain_, q_);
  for (int l = 0; l < chain_.joint_count(); ++l) {
    const Vec3 com = transforms[l] * chain_.links[l].com;
    energy -= chain_.links[l].mass * chain_.gravity.dot(com);
  }
  return energy;
}

// --- Scenarios --------------------------------------------------------

namespace {

ComplianceCommand hold_command(const Pose& x_des, double k_trans, double k_rot,
                               const Wrench& f_cmd = {}) {
  ComplianceCommand cmd;
  cmd.x_des = x_des;
  cmd.kp.topLeftCorner<3, 3>() = k_trans * Mat3::Identity();
  cmd.kp.bottomRightCorner<3, 3>() = k_rot * Mat3::Identity();
  cmd.kd = critical_damping(cmd.kp);
  cmd.f_cmd = f_cmd;
  return cmd;
}

}  // namespace

PressResult scenario_press(SimWorld& world, const PressOptions& options) {
  if (std::abs(options.axis.norm() - 1.0) > 1e-9) {
    throw std::runtime_error("sim: press axis is not unit norm");
  }
  ControllerConfig config = options.control;
  config.sites = {options.site};
  Controller controller(world.chain(), config);
  controller.reset(world.q());

  const Pose x_des = site_pose(world.chain(), world.q(), options.site);
  const std::vector<ComplianceCommand> commands = {
      hold_command(x_des, options.task_stiffness, options.rot_stiffness)};

  const double dt = config.dt;
  const double t_ramp_end = options.settle_time + options.ramp_time;
  const double t_hold_end = t_ramp_end + options.hold_time;
  const double t_release_end = t_hold_end + options.release_time;
  const double t_total = t_release_end + 0.5;

  const auto profile = [&](double t) {
    if (t < options.settle_time) return 0.0;
    if (t < t_ramp_end) {
      return options.magnitude * (t - options.settle_time) / options.ramp_time;
    }
    if (t < t_hold_end) return options.magnitude;
    if (t < t_release_end) {
      return options.magnitude * (t_release_end - t) / options.release_time;
    }
    return 0.0;
  };

  PressResult result;
  double abs_err_sum = 0.0;
  int count = 0;
  const double t0 = world.time();
  for (double t = 0.0; t < t_total; t += dt) {
    world.set_applied_force(options.site, profile(t + dt) * options.axis);
    const Telemetry telemetry =
        world.sim_step(controller.joint_targets(), dt);
    const TraceRecord record = controller.run_step(telemetry, commands);
    if (record.fault) {
      throw std::runtime_error("sim: controller fault during press scenario");
    }
    if (t + dt < options.settle_time) continue;  // let gravity settle
    const Vec3 estimated = record.f_ext[0].force;
    const Vec3 truth = world.true_wrench(options.site).force;
    result.t.push_back(world.time() - t0);
    result.estimated.push_back(estimated);
    result.truth.push_back(truth);
    abs_err_sum += (estimated - truth).cwiseAbs().sum();
    count += 3;
  }
  world.clear_applied_forces();
  result.mae = (count > 0) ? abs_err_sum / count : 0.0;
  return result;
}

DrawResult scenario_draw(SimWorld& world, const DrawOptions& options) {
  if (options.waypoints.size() < 2) {
    throw std::runtime_error("sim: draw scenario needs >= 2 waypoints");
  }
  ContactSurface surface = options.surface;
  surface.site = options.site;
  world.add_surface(surface);

  ControllerConfig config = options.control;
  config.sites = {options.site};
  Controller controller(world.chain(), config);
  controller.reset(world.q());

  // Arc-length parameterization of the waypoint polyline.
  std::vector<double> arclen{0.0};
  for (size_t i = 1; i < options.waypoints.size(); ++i) {
    arclen.push_back(arclen.back() +
                     (options.waypoints[i] - options.waypoints[i - 1]).norm());
  }
  const auto path_point = [&](double s) -> Vec3 {
    if (s <= 0) return options.waypoints.front();
    if (s >= arclen.back()) return options.waypoints.back();
    size_t seg = 1;
    while (arclen[seg] < s) ++seg;
    const double u = (s - arclen[seg - 1]) / (arclen[seg] - arclen[seg - 1]);
    return (1 - u) * options.waypoints[seg - 1] + u * options.waypoints[seg];
  };

  const Pose start_pose = site_pose(world.chain(), world.q(), options.site);
  const Mat3 kp_trans = stiffness_from_normal(
      surface.normal, options.k_normal, options.k_tangential);
  const Wrench f_cmd{-options.normal_force * surface.normal, Vec3::Zero()};

  const double dt = config.dt;
  const double draw_time = arclen.back() / options.speed;
  const double stats_start = options.approach_time + 1.0;  // settle contact
  const double t_total = options.approach_time + draw_time;

  DrawResult result;
  result.commanded_force = options.normal_force;
  double fn_sum = 0.0, fn_err_sum = 0.0, tan_sum = 0.0;
  int contact_ticks = 0, stat_ticks = 0;

  for (double t = 0.0; t < t_total; t += dt) {
    const double t_next = t + dt;
    Pose x_des = start_pose;
    Wrench f = f_cmd;
    if (t_next < options.approach_time) {
      const double u = t_next / options.approach_time;
      x_des.position =
          (1 - u) * start_pose.position + u * options.waypoints.front();
      f = Wrench{};  // engage force only once on the surface
    } else {
      x_des.position = path_point((t_next - options.approach_time) *
                                  options.speed);
    }

    ComplianceCommand cmd;
    cmd.x_des = x_des;
    cmd.kp.topLeftCorner<3, 3>() = kp_trans;
    cmd.kp.bottomRightCorner<3, 3>() =
        options.rot_stiffness * Mat3::Identity();
    cmd.kd = critical_damping(cmd.kp);
    cmd.f_cmd = f;

    const Telemetry telemetry = world.sim_step(controller.joint_targets(), dt);
    const TraceRecord record = controller.run_step(telemetry, {cmd});
    if (record.fault) {
      throw std::runtime_error("sim: controller fault during draw scenario");
    }
    ++result.ticks;
    if (t_next < stats_start) continue;

    const double fn =
        world.true_wrench(options.site).force.dot(surface.normal);
    const Vec3 p = site_pose(world.chain(), world.q(), options.site).position;
    const Vec3 delta = p - x_des.position;
    const Vec3 tan_err = delta - delta.dot(surface.normal) * surface.normal;

    result.t.push_back(world.time());
    result.normal_force.push_back(fn);
    result.site_path.push_back(p);
    result.desired_path.push_back(x_des.position);

    ++stat_ticks;
    fn_sum += fn;
    fn_err_sum += std::abs(fn - options.normal_force);
    tan_sum += tan_err.norm();
    result.max_tangential_error =
        std::max(result.max_tangential_error, tan_err.norm());
    result.peak_normal_force = std::max(result.peak_normal_force, fn);
    if (fn > 0.1) ++contact_ticks;
  }

  if (stat_ticks > 0) {
    result.mean_normal_force = fn_sum / stat_ticks;
    result.mean_force_error = fn_err_sum / stat_ticks;
    result.mean_tangential_error = tan_sum / stat_ticks;
    result.contact_fraction = static_cast<double>(contact_ticks) / stat_ticks;
  }
  result.contact_loss = result.contact_fraction < 0.6;
  return result;
}

}  // namespace complyctl
