#include "complyctl/chain.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace complyctl {

namespace {

using nlohmann::json;

constexpr double kUnitTol = 1e-9;

Vec3 read_vec3(const json& node, const std::string& key) {
  const auto& arr = node.at(key);
  if (!arr.is_array() || arr.size() != 3) {
    throw std::runtime_error("chain: '" + key + "' must be a 3-array");
  }
  return Vec3(arr[0].get<double>(), arr[1].get<double>(), arr[2].get<double>());
}

Quat read_quat(const json& node, const std::string& key) {
  if (!node.contains(key)) return Quat::Identity();
  const auto& arr = node.at(key);
  if (!arr.is_array() || arr.size() != 4) {
    throw std::runtime_error("chain: '" + key + "' must be a [w,x,y,z] array");
  }
  Quat q(arr[0].get<double>(), arr[1].get<double>(), arr[2].get<double>(),
         arr[3].get<double>());
  if (std::abs(q.norm() - 1.0) > kUnitTol) {
    throw std::runtime_error("chain: '" + key + "' quaternion is not unit");
  }
  return q;
}

}  // namespace

void MotorParams::validate() const {
  if (!(kv > 0)) throw std::runtime_error("motor: kv must be > 0");
  if (!(rw > 0)) throw std::runtime_error("motor: rw must be > 0");
  if (!(kt > 0)) throw std::runtime_error("motor: kt must be > 0");
  if (!(eta > 0) || eta > 1.0) {
    throw std::runtime_error("motor: eta must be in (0, 1]");
  }
  if (!(vbus > 0)) throw std::runtime_error("motor: vbus must be > 0");
  if (eps_vel < 0) throw std::runtime_error("motor: eps_vel must be >= 0");
}

const MotorParams& ChainModel::motor(int joint) const {
  const auto it = motors.find(joints.at(joint).motor);
  if (it == motors.end()) {
    throw std::runtime_error("chain: dangling motor reference '" +
                             joints.at(joint).motor + "'");
  }
  return it->second;
}

void ChainModel::validate() const {
  if (joints.empty()) throw std::runtime_error("chain: no joints");
  if (links.size() != joints.size()) {
    throw std::runtime_error("chain: one link inertia required per joint");
  }
  if (sites.empty()) throw std::runtime_error("chain: at least one site");
  for (int i = 0; i < joint_count(); ++i) {
    const JointSpec& j = joints[i];
    if (std::abs(j.axis.norm() - 1.0) > kUnitTol) {
      throw std::runtime_error("chain: joint '" + j.name +
                               "' axis is not unit norm");
    }
    if (!(j.limit_min < j.limit_max)) {
      throw std::runtime_error("chain: joint '" + j.name + "' limits invalid");
    }
    if (!(j.gear_ratio > 0)) {
      throw std::runtime_error("chain: joint '" + j.name +
                               "' gear ratio must be > 0");
    }
    if (j.parent >= i) {
      throw std::runtime_error("chain: joint '" + j.name +
                               "' breaks topological order");
    }
    if (j.parent < -1) {
      throw std::runtime_error("chain: joint '" + j.name + "' bad parent");
    }
    motor(i);  // throws on dangling reference
    if (links[i].mass < 0) {
      throw std::runtime_error("chain: link mass must be >= 0");
    }
  }
  for (const SiteSpec& s : sites) {
    if (s.parent_joint < 0 || s.parent_joint >= joint_count()) {
      throw std::runtime_error("chain: site '" + s.name +
                               "' has invalid parent joint");
    }
  }
}

ChainModel parse_chain(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("chain: parse error: ") + e.what());
  }

  ChainModel chain;
  try {
    if (root.contains("gravity")) chain.gravity = read_vec3(root, "gravity");
    for (const auto& [name, node] : root.at("motors").items()) {
      MotorParams m;
      m.kv = node.at("kv").get<double>();
      m.rw = node.at("rw").get<double>();
      m.kt = node.at("kt").get<double>();
      m.eta = node.value("eta", 1.0);
      m.vbus = node.at("vbus").get<double>();
      m.eps_vel = node.value("eps_vel", 0.0);
      m.has_current_sensor = node.value("has_current_sensor", false);
      m.validate();
      chain.motors[name] = m;
    }
    for (const auto& node : root.at("joints")) {
      JointSpec j;
      j.name = node.at("name").get<std::string>();
      j.parent = node.value("parent", -1);
      j.origin_translation = read_vec3(node, "origin_translation");
      j.origin_rotation = read_quat(node, "origin_rotation");
      j.axis = read_vec3(node, "axis");
      const auto& lim = node.at("limits");
      j.limit_min = lim[0].get<double>();
      j.limit_max = lim[1].get<double>();
      j.gear_ratio = node.value("gear_ratio", 1.0);
      j.motor = node.at("motor").get<std::string>();
      chain.joints.push_back(j);
    }
    for (const auto& node : root.at("links")) {
      LinkInertia link;
      link.mass = node.at("mass").get<double>();
      link.com = read_vec3(node, "com");
      chain.links.push_back(link);
    }
    for (const auto& node : root.at("sites")) {
      SiteSpec s;
      s.name = node.at("name").get<std::string>();
      s.parent_joint = node.at("parent").get<int>();
      s.offset_translation = read_vec3(node, "offset_translation");
      s.offset_rotation = read_quat(node, "offset_rotation");
      chain.sites.push_back(s);
    }
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("chain: schema error: ") + e.what());
  }

  chain.validate();
  return chain;
}

ChainModel load_chain(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("chain: cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_chain(buffer.str());
}

std::vector<Eigen::Isometry3d> joint_transforms(const ChainModel& chain,
                                                const VecX& q) {
  if (q.size() != chain.joint_count()) {
    throw std::runtime_error("chain: joint vector dimension mismatch");
  }
  std::vector<Eigen::Isometry3d> transforms(chain.joints.size());
  for (int i = 0; i < chain.joint_count(); ++i) {
    const JointSpec& j = chain.joints[i];
    Eigen::Isometry3d local = Eigen::Isometry3d::Identity();
    local.translate(j.origin_translation);
    local.rotate(j.origin_rotation);
    local.rotate(Eigen::AngleAxisd(q[i], j.axis));
    transforms[i] = (j.parent < 0) ? local : transforms[j.parent] * local;
  }
  return transforms;
}

Pose site_pose(const ChainModel& chain, const VecX& q, int site) {
  return forward_kinematics(chain, q).at(site);
}

std::vector<Pose> forward_kinematics(const ChainModel& chain, const VecX& q) {
  const auto transforms = joint_transforms(chain, q);
  std::vector<Pose> poses;
  poses.reserve(chain.sites.size());
  for (const SiteSpec& s : chain.sites) {
    Eigen::Isometry3d offset = Eigen::Isometry3d::Identity();
    offset.translate(s.offset_translation);
    offset.rotate(s.offset_rotation);
    const Eigen::Isometry3d world = transforms[s.parent_joint] * offset;
    Pose pose;
    pose.position = world.translation();
    pose.orientation = matrix_to_rotvec(world.rotation());
    poses.push_back(pose);
  }
  return poses;
}

namespace {

// Axis/lever-arm recursion shared by site and center-of-mass Jacobians.
// Columns for joints off the ancestor path of `leaf_joint` stay zero.
void fill_linear_jacobian(const ChainModel& chain,
                          const std::vector<Eigen::Isometry3d>& transforms,
                          int leaf_joint, const Vec3& point_world,
                          Mat3X* linear, Mat3X* angular) {
  for (int i = leaf_joint; i >= 0; i = chain.joints[i].parent) {
    const Vec3 axis_world = transforms[i].rotation() * chain.joints[i].axis;
    const Vec3 lever = point_world - transforms[i].translation();
    linear->col(i) = axis_world.cross(lever);
    if (angular != nullptr) angular->col(i) = axis_world;
  }
}

}  // namespace

SiteJacobian jacobian(const ChainModel& chain, const VecX& q, int site) {
  if (site < 0 || site >= chain.site_count()) {
    throw std::runtime_error("chain: site index out of range");
  }
  const auto transforms = joint_transforms(chain, q);
  const SiteSpec& s = chain.sites[site];
  const Vec3 point =
      transforms[s.parent_joint] * s.offset_translation;

  SiteJacobian jac;
  jac.linear = Mat3X::Zero(3, chain.joint_count());
  jac.angular = Mat3X::Zero(3, chain.joint_count());
  fill_linear_jacobian(chain, transforms, s.parent_joint, point, &jac.linear,
                       &jac.angular);
  return jac;
}

VecX gravity_torques(const ChainModel& chain, const VecX& q) {
  const auto transforms = joint_transforms(chain, q);
  VecX tau = VecX::Zero(chain.joint_count());
  Mat3X jac_com(3, chain.joint_count());
  for (int l = 0; l < chain.joint_count(); ++l) {
    const LinkInertia& link = chain.links[l];
    if (link.mass == 0.0) continue;
    const Vec3 com_world = transforms[l] * link.com;
    jac_com.setZero();
    fill_linear_jacobian(chain, transforms, l, com_world, &jac_com, nullptr);
    // Holding torque: negate the torque gravity applies about each joint.
    tau -= jac_com.transpose() * (link.mass * chain.gravity);
  }
  return tau;
}

}  // namespace complyctl
