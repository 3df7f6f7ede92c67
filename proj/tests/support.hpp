#pragma once

// Shared helpers for the test binaries: programmatic chains and
// reproducible random sampling.

#include <random>
#include <string>

#include "complyctl/chain.hpp"

namespace complyctl::test {

// Serial arm with n revolute joints, alternating z/y/x axes, stacked
// links, and one site at the tip (plus one mid-chain site when
// mid_site is set). Masses taper toward the tip.
inline ChainModel make_serial_arm(int n, bool mid_site = false,
                                  double segment = 0.15) {
  ChainModel chain;
  MotorParams m;
  m.kv = 50.0;
  m.rw = 2.0;
  m.kt = 0.008;
  m.eta = 0.8;
  m.vbus = 12.0;
  m.eps_vel = 0.05;
  m.has_current_sensor = true;
  chain.motors["m"] = m;

  const Vec3 axes[3] = {Vec3::UnitZ(), Vec3::UnitY(), Vec3::UnitX()};
  for (int i = 0; i < n; ++i) {
    JointSpec j;
    j.name = "j" + std::to_string(i);
    j.parent = i - 1;
    j.origin_translation = (i == 0) ? Vec3(0, 0, 0.1) : Vec3(0, 0, segment);
    j.axis = axes[i % 3];
    j.limit_min = -3.0;
    j.limit_max = 3.0;
    j.gear_ratio = 200.0;
    j.motor = "m";
    chain.joints.push_back(j);

    LinkInertia link;
    link.mass = 0.6 * std::pow(0.85, i);
    link.com = Vec3(0, 0, segment / 2);
    chain.links.push_back(link);
  }

  SiteSpec tip;
  tip.name = "tip";
  tip.parent_joint = n - 1;
  tip.offset_translation = Vec3(0, 0, segment);
  chain.sites.push_back(tip);
  if (mid_site && n >= 2) {
    SiteSpec mid;
    mid.name = "mid";
    mid.parent_joint = n / 2;
    mid.offset_translation = Vec3(0, 0.02, segment / 2);
    chain.sites.push_back(mid);
  }
  chain.validate();
  return chain;
}

// Joint vector uniform in [-1, 1] rad (well inside the +/-3 limits).
inline VecX random_config(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::uniform_real_distribution<double> uni(-scale, scale);
  VecX q(n);
  for (int i = 0; i < n; ++i) q[i] = uni(rng);
  return q;
}

inline Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Vec3 v(gauss(rng), gauss(rng), gauss(rng));
  while (v.norm() < 1e-6) v = Vec3(gauss(rng), gauss(rng), gauss(rng));
  return v.normalized();
}

}  // namespace complyctl::test
