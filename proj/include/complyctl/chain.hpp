#pragma once

#include <map>
#include <string>
#include <vector>

#include "complyctl/geometry.hpp"

namespace complyctl {

// Electrical and mechanical constants of one actuator.
struct MotorParams {
  double kv = 1.0;        // velocity constant, rad/s per V
  double rw = 1.0;        // winding resistance, Ohm
  double kt = 1.0;        // torque constant, N*m per A (motor side)
  double eta = 1.0;       // transmission efficiency, (0, 1]
  double vbus = 12.0;     // bus voltage, V
  double eps_vel = 0.0;   // velocity debounce threshold, rad/s
  bool has_current_sensor = false;

  void validate() const;
};

struct JointSpec {
  std::string name;
  int parent = -1;  // parent joint index, -1 = world
  Vec3 origin_translation{Vec3::Zero()};
  Quat origin_rotation{Quat::Identity()};
  Vec3 axis{Vec3::UnitZ()};  // rotation axis in local frame, unit norm
  double limit_min = -3.141592653589793;
  double limit_max = 3.141592653589793;
  double gear_ratio = 1.0;
  std::string motor;
};

struct LinkInertia {
  double mass = 0.0;       // kg
  Vec3 com{Vec3::Zero()};  // center of mass in link frame, m
};

struct SiteSpec {
  std::string name;
  int parent_joint = 0;
  Vec3 offset_translation{Vec3::Zero()};
  Quat offset_rotation{Quat::Identity()};
};

// Immutable after load; all operations below are pure functions of
// (chain, q) and safe to call concurrently.
struct ChainModel {
  std::vector<JointSpec> joints;
  std::vector<LinkInertia> links;  // one per joint
  std::vector<SiteSpec> sites;
  Vec3 gravity{0.0, 0.0, -9.81};
  std::map<std::string, MotorParams> motors;

  int joint_count() const { return static_cast<int>(joints.size()); }
  int site_count() const { return static_cast<int>(sites.size()); }
  const MotorParams& motor(int joint) const;

  void validate() const;
};

ChainModel load_chain(const std::string& path);
ChainModel parse_chain(const std::string& json_text);

// World transforms of every joint frame (rotation applied).
std::vector<Eigen::Isometry3d> joint_transforms(const ChainModel& chain,
                                                const VecX& q);

std::vector<Pose> forward_kinematics(const ChainModel& chain, const VecX& q);

Pose site_pose(const ChainModel& chain, const VecX& q, int site);

struct SiteJacobian {
  Mat3X linear;   // 3 x n, maps qdot to site linear velocity, world frame
  Mat3X angular;  // 3 x n, maps qdot to site angular velocity, world frame
};

SiteJacobian jacobian(const ChainModel& chain, const VecX& q, int site);

// Joint torque the actuators must exert to hold the posture statically
// against gravity (the +dU/dq convention used by the external-torque
// subtraction in motor_model).
VecX gravity_torques(const ChainModel& chain, const VecX& q);

}  // namespace complyctl
