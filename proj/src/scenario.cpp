#include "complyctl/scenario.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "complyctl/io.hpp"

namespace complyctl {

namespace {

using nlohmann::json;

Vec3 to_vec3(const json& arr) {
  if (!arr.is_array() || arr.size() != 3) {
    throw std::runtime_error("scenario: expected a 3-array");
  }
  return Vec3(arr[0].get<double>(), arr[1].get<double>(), arr[2].get<double>());
}

}  // namespace

SimWorld Scenario::make_world(uint64_t seed) const {
  std::vector<SimMotor> motors;
  for (int i = 0; i < chain.joint_count(); ++i) {
    SimMotor m;
    m.params = chain.motor(i);
    m.noise_sigma = noise_sigma;
    m.quantization = quantization;
    m.kp_servo = servo_kp;
    m.kd_servo = servo_kd;
    m.inertia = joint_inertia;
    motors.push_back(m);
  }
  SimWorld world(chain, motors, seed, sim_dt);
  VecX qdot = VecX::Zero(chain.joint_count());
  world.set_state(initial_q, qdot);
  return world;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("scenario: cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  json root;
  try {
    root = json::parse(buffer.str());
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("scenario: parse error: ") +
                             e.what());
  }

  Scenario scenario;
  try {
    scenario.type = root.at("type").get<std::string>();
    if (scenario.type != "press" && scenario.type != "draw") {
      throw std::runtime_error("scenario: unknown type '" + scenario.type +
                               "'");
    }

    std::filesystem::path chain_path(root.at("chain").get<std::string>());
    if (chain_path.is_relative()) {
      chain_path = std::filesystem::path(path).parent_path() / chain_path;
    }
    scenario.chain = load_chain(chain_path.string());

    const auto q0 = root.at("initial_q").get<std::vector<double>>();
    if (static_cast<int>(q0.size()) != scenario.chain.joint_count()) {
      throw std::runtime_error("scenario: initial_q dimension mismatch");
    }
    scenario.initial_q = Eigen::Map<const VecX>(q0.data(), q0.size());

    if (root.contains("sim")) {
      const auto& sim = root.at("sim");
      scenario.sim_dt = sim.value("sim_dt", scenario.sim_dt);
      scenario.noise_sigma = sim.value("noise_sigma", scenario.noise_sigma);
      scenario.quantization = sim.value("quantization", scenario.quantization);
      scenario.servo_kp = sim.value("servo_kp", scenario.servo_kp);
      scenario.servo_kd = sim.value("servo_kd", scenario.servo_kd);
      scenario.joint_inertia = sim.value("inertia", scenario.joint_inertia);
    }
    if (root.contains("control")) {
      scenario.control = parse_controller_config(root.at("control").dump());
    }

    if (scenario.type == "press") {
      const auto& node = root.at("press");
      PressOptions& p = scenario.press;
      p.site = node.value("site", 0);
      p.axis = to_vec3(node.at("axis"));
      p.magnitude = node.value("magnitude", p.magnitude);
      p.settle_time = node.value("settle_time", p.settle_time);
      p.ramp_time = node.value("ramp_time", p.ramp_time);
      p.hold_time = node.value("hold_time", p.hold_time);
      p.release_time = node.value("release_time", p.release_time);
      p.task_stiffness = node.value("task_stiffness", p.task_stiffness);
      p.rot_stiffness = node.value("rot_stiffness", p.rot_stiffness);
      p.control = scenario.control;
    } else {
      const auto& node = root.at("draw");
      DrawOptions& d = scenario.draw;
      d.site = node.value("site", 0);
      const auto& surf = node.at("surface");
      d.surface.point = to_vec3(surf.at("point"));
      d.surface.normal = to_vec3(surf.at("normal"));
      d.surface.stiffness = surf.value("stiffness", d.surface.stiffness);
      d.surface.friction = surf.value("friction", d.surface.friction);
      d.surface.tangential_damping =
          surf.value("tangential_damping", d.surface.tangential_damping);
      for (const auto& wp : node.at("waypoints")) {
        d.waypoints.push_back(to_vec3(wp));
      }
      d.speed = node.value("speed", d.speed);
      d.normal_force = node.value("normal_force", d.normal_force);
      d.k_normal = node.value("k_normal", d.k_normal);
      d.k_tangential = node.value("k_tangential", d.k_tangential);
      d.rot_stiffness = node.value("rot_stiffness", d.rot_stiffness);
      d.approach_time = node.value("approach_time", d.approach_time);
      d.control = scenario.control;
    }
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("scenario: schema error: ") +
                             e.what());
  }
  return scenario;
}

}  // namespace complyctl
