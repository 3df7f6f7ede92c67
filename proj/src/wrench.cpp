#include "complyctl/wrench.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace complyctl {

void EstimatorConfig::validate() const {
  if (lambda < 0) throw std::runtime_error("estimator: lambda must be >= 0");
  if (mode == EstimatorMode::AxisSet) {
    if (axes.empty()) {
      throw std::runtime_error("estimator: axis-set mode needs >= 1 axis");
    }
    for (const EstimatorAxis& a : axes) {
      if (std::abs(a.axis.norm() - 1.0) > 1e-9) {
        throw std::runtime_error("estimator: axis is not unit norm");
      }
    }
  }
}

namespace {

// Solve (G + lambda I) x = rhs for symmetric PSD G, reporting the
// conditioning of the regularized Gram matrix.
template <int N>
Eigen::Matrix<double, N, 1> solve_gram(
    const Eigen::Matrix<double, N, N>& gram,
    const Eigen::Matrix<double, N, 1>& rhs, double lambda, double* condition) {
  Eigen::Matrix<double, N, N> regularized =
      gram + lambda * Eigen::Matrix<double, N, N>::Identity();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, N, N>> eig(regularized);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (condition != nullptr) {
    *condition = (lo > 0) ? hi / lo : std::numeric_limits<double>::infinity();
  }
  if (lo <= hi * 1e-14) {
    throw std::runtime_error(
        "estimator: singular system (rank-deficient Jacobian with lambda=0)");
  }
  return Eigen::LLT<Eigen::Matrix<double, N, N>>(regularized).solve(rhs);
}

}  // namespace

EstimateReport estimate_full(const Mat3X& jp, const Mat3X* jr, const VecX& tau,
                             double lambda) {
  if (jp.cols() != tau.size() || (jr != nullptr && jr->cols() != tau.size())) {
    throw std::runtime_error("estimator: Jacobian/torque dimension mismatch");
  }
  if (lambda < 0) throw std::runtime_error("estimator: lambda must be >= 0");

  EstimateReport report;
  if (jr == nullptr) {
    const Mat3 gram = jp * jp.transpose();
    const Vec3 f =
        solve_gram<3>(gram, Vec3(jp * tau), lambda, &report.gram_condition);
    report.wrench.force = f;
    report.residual = (jp.transpose() * f - tau).norm();
  } else {
    Eigen::Matrix<double, 6, Eigen::Dynamic> stacked(6, jp.cols());
    stacked.topRows<3>() = jp;
    stacked.bottomRows<3>() = *jr;
    const Mat6 gram = stacked * stacked.transpose();
    const Vec6 f = solve_gram<6>(gram, Vec6(stacked * tau), lambda,
                                 &report.gram_condition);
    report.wrench = Wrench::from_vector(f);
    report.residual = (stacked.transpose() * f - tau).norm();
  }
  return report;
}

Vec3 estimate_axis(const Mat3X& j, const VecX& tau, const Vec3& axis,
                   double lambda, double* magnitude) {
  if (std::abs(axis.norm() - 1.0) > 1e-9) {
    throw std::runtime_error("estimator: axis is not unit norm");
  }
  if (j.cols() != tau.size()) {
    throw std::runtime_error("estimator: Jacobian/torque dimension mismatch");
  }
  const Eigen::RowVectorXd row = axis.transpose() * j;
  const double denom = row.squaredNorm() + lambda;
  if (denom <= 0) {
    throw std::runtime_error("estimator: axis orthogonal to motions, lambda=0");
  }
  const double m = row.dot(tau) / denom;
  if (magnitude != nullptr) *magnitude = m;
  return m * axis;
}

EstimateReport estimate(const EstimatorConfig& config, const Mat3X& jp,
                        const Mat3X& jr, const VecX& tau) {
  config.validate();
  switch (config.mode) {
    case EstimatorMode::FullForce:
      return estimate_full(jp, nullptr, tau, config.lambda);
    case EstimatorMode::FullWrench: {
      if (config.stacked) return estimate_full(jp, &jr, tau, config.lambda);
      EstimateReport force = estimate_full(jp, nullptr, tau, config.lambda);
      EstimateReport torque = estimate_full(jr, nullptr, tau, config.lambda);
      EstimateReport report;
      report.wrench.force = force.wrench.force;
      report.wrench.torque = torque.wrench.force;
      report.residual = std::hypot(force.residual, torque.residual);
      report.gram_condition =
          std::max(force.gram_condition, torque.gram_condition);
      return report;
    }
    case EstimatorMode::AxisSet: {
      EstimateReport report;
      for (const EstimatorAxis& a : config.axes) {
        if (a.kind == AxisKind::Force) {
          report.wrench.force += estimate_axis(jp, tau, a.axis, config.lambda);
        } else {
          report.wrench.torque += estimate_axis(jr, tau, a.axis, config.lambda);
        }
      }
      report.residual = (jp.transpose() * report.wrench.force +
                         jr.transpose() * report.wrench.torque - tau)
                            .norm();
      return report;
    }
  }
  throw std::runtime_error("estimator: unknown mode");
}

}  // namespace complyctl
