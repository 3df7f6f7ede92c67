#pragma once

#include <vector>

#include "complyctl/geometry.hpp"

namespace complyctl {

// External wrench at a contact site, world frame.
struct Wrench {
  Vec3 force{Vec3::Zero()};
  Vec3 torque{Vec3::Zero()};

  Vec6 vector() const {
    Vec6 v;
    v << force, torque;
    return v;
  }
  static Wrench from_vector(const Vec6& v) {
    return {v.head<3>(), v.tail<3>()};
  }
};

enum class EstimatorMode { FullForce, FullWrench, AxisSet };

enum class AxisKind { Force, Torque };

struct EstimatorAxis {
  Vec3 axis{Vec3::UnitZ()};  // unit norm
  AxisKind kind = AxisKind::Force;
};

struct EstimatorConfig {
  double lambda = 1e-3;
  EstimatorMode mode = EstimatorMode::FullForce;
  std::vector<EstimatorAxis> axes;
  // FullWrench only: stack [Jp; Jr] into one 6x6 solve (captures
  // force/torque coupling) vs two independent 3x3 solves.
  bool stacked = true;

  void validate() const;
};

struct EstimateReport {
  Wrench wrench;
  double residual = 0.0;        // ||J^T f - tau||
  double gram_condition = 1.0;  // condition number of J J^T + lambda I
};

// Stationarity of the ridge problem: (Jp Jp^T + lambda I) f = Jp tau.
// With jr != nullptr the stacked 6D system is solved instead.
EstimateReport estimate_full(const Mat3X& jp, const Mat3X* jr, const VecX& tau,
                             double lambda);

// Axis-aligned 1D ridge estimate; returns magnitude * axis.
Vec3 estimate_axis(const Mat3X& j, const VecX& tau, const Vec3& axis,
                   double lambda, double* magnitude = nullptr);

EstimateReport estimate(const EstimatorConfig& config, const Mat3X& jp,
                        const Mat3X& jr, const VecX& tau);

}  // namespace complyctl
