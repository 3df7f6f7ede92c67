#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "complyctl/wrench.hpp"
#include "support.hpp"

using namespace complyctl;

namespace {

Mat3X random_jacobian(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> gauss(0.0, 0.4);
  Mat3X j(3, n);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < n; ++c) j(r, c) = gauss(rng);
  return j;
}

// Reference solve of (J J^T + lambda I) f = J tau via dense inverse.
Vec3 normal_equations_oracle(const Mat3X& j, const VecX& tau, double lambda) {
  const Mat3 gram = j * j.transpose() + lambda * Mat3::Identity();
  return gram.inverse() * (j * tau);
}

}  // namespace

TEST_CASE("identity-like jacobian recovers the force directly") {
  Mat3X j(3, 3);
  j.setIdentity();
  VecX tau(3);
  tau << 1.0, -2.0, 0.5;
  const EstimateReport est = estimate_full(j, nullptr, tau, 0.0);
  CHECK((est.wrench.force - Vec3(1.0, -2.0, 0.5)).norm() < 1e-12);
  CHECK(est.wrench.torque.norm() == 0.0);
}

TEST_CASE("ridge solution satisfies stationarity and matches the oracle") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss;
  for (int k = 0; k < 300; ++k) {
    const int n = 3 + static_cast<int>(rng() % 10);
    const Mat3X j = random_jacobian(rng, n);
    VecX tau(n);
    for (int i = 0; i < n; ++i) tau[i] = gauss(rng);
    const double lambda = 1e-3;

    const EstimateReport est = estimate_full(j, nullptr, tau, lambda);
    const Vec3 f = est.wrench.force;
    const Vec3 grad = (j * j.transpose() + lambda * Mat3::Identity()) * f -
                      j * tau;
    CHECK(grad.norm() < 1e-10 * (1.0 + tau.norm()));
    CHECK((f - normal_equations_oracle(j, tau, lambda)).norm() <
          1e-10 * (1.0 + tau.norm()));
  }
}

TEST_CASE("lambda -> 0 approaches the unregularized least squares") {
  std::mt19937_64 rng(8);
  const Mat3X j = random_jacobian(rng, 6);
  const Vec3 f_true(2.0, -1.0, 0.5);
  const VecX tau = j.transpose() * f_true;  // consistent system
  const EstimateReport est = estimate_full(j, nullptr, tau, 1e-12);
  CHECK((est.wrench.force - f_true).norm() < 1e-6);
}

TEST_CASE("shrinkage is monotone in lambda for consistent data") {
  std::mt19937_64 rng(9);
  const Mat3X j = random_jacobian(rng, 8);
  const VecX tau = j.transpose() * Vec3(1.5, 0.5, -1.0);
  double prev = std::numeric_limits<double>::infinity();
  for (double lambda : {1e-6, 1e-3, 1e-1, 1.0, 10.0}) {
    const double norm = estimate_full(j, nullptr, tau, lambda).wrench.force.norm();
    CHECK(norm <= prev + 1e-12);
    prev = norm;
  }
}

TEST_CASE("stacked 6D estimate recovers force and torque") {
  std::mt19937_64 rng(10);
  for (int k = 0; k < 50; ++k) {
    const int n = 8;
    const Mat3X jp = random_jacobian(rng, n);
    const Mat3X jr = random_jacobian(rng, n);
    Vec6 w_true;
    w_true << 1.0, -0.5, 2.0, 0.1, 0.2, -0.1;
    const VecX tau =
        jp.transpose() * w_true.head<3>() + jr.transpose() * w_true.tail<3>();
    const EstimateReport est = estimate_full(jp, &jr, tau, 1e-10);
    CHECK((est.wrench.vector() - w_true).norm() < 1e-5);
  }
}

TEST_CASE("axis estimate matches a fine 1D grid scan") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss;
  for (int k = 0; k < 20; ++k) {
    const Mat3X j = random_jacobian(rng, 6);
    VecX tau(6);
    for (int i = 0; i < 6; ++i) tau[i] = gauss(rng);
    const Vec3 u = test::random_unit(rng);
    const double lambda = 1e-3;

    double mag = 0.0;
    estimate_axis(j, tau, u, lambda, &mag);

    // coarse-to-fine scan of 0.5*||J^T(a u) - tau||^2 + 0.5*lambda*a^2
    const auto cost = [&](double a) {
      return 0.5 * (j.transpose() * (a * u) - tau).squaredNorm() +
             0.5 * lambda * a * a;
    };
    double lo = -50.0, hi = 50.0;
    for (int refine = 0; refine < 6; ++refine) {
      const double step = (hi - lo) / 400.0;
      double best = lo, best_cost = cost(lo);
      for (int i = 1; i <= 400; ++i) {
        const double a = lo + i * step;
        if (cost(a) < best_cost) {
          best_cost = cost(a);
          best = a;
        }
      }
      lo = best - step;
      hi = best + step;
    }
    CHECK(std::abs(mag - 0.5 * (lo + hi)) < 1e-4);
  }
}

TEST_CASE("axis estimate is antisymmetric in the axis") {
  std::mt19937_64 rng(12);
  const Mat3X j = random_jacobian(rng, 5);
  VecX tau(5);
  tau << 0.3, -0.1, 0.2, 0.0, 0.4;
  const Vec3 u = test::random_unit(rng);
  const Vec3 f_pos = estimate_axis(j, tau, u, 1e-3);
  const Vec3 f_neg = estimate_axis(j, tau, -u, 1e-3);
  CHECK((f_pos - f_neg).norm() < 1e-14);  // magnitude flips with the axis
  CHECK_THROWS(estimate_axis(j, tau, Vec3(0, 0, 2), 1e-3));
}

TEST_CASE("axis-set estimator sums its axis contributions") {
  std::mt19937_64 rng(13);
  const Mat3X jp = random_jacobian(rng, 6);
  const Mat3X jr = random_jacobian(rng, 6);
  VecX tau(6);
  tau << 0.5, 0.1, -0.3, 0.2, 0.0, -0.1;

  EstimatorConfig config;
  config.mode = EstimatorMode::AxisSet;
  config.lambda = 1e-3;
  config.axes = {{Vec3::UnitX(), AxisKind::Force},
                 {Vec3::UnitZ(), AxisKind::Force},
                 {Vec3::UnitY(), AxisKind::Torque}};
  const EstimateReport est = estimate(config, jp, jr, tau);

  const Vec3 fx = estimate_axis(jp, tau, Vec3::UnitX(), 1e-3);
  const Vec3 fz = estimate_axis(jp, tau, Vec3::UnitZ(), 1e-3);
  const Vec3 ty = estimate_axis(jr, tau, Vec3::UnitY(), 1e-3);
  CHECK((est.wrench.force - (fx + fz)).norm() < 1e-14);
  CHECK((est.wrench.torque - ty).norm() < 1e-14);
}

TEST_CASE("gram condition number reflects ill-posed geometry") {
  Mat3X j(3, 4);
  j.setZero();
  j.row(0) << 1.0, 0.5, -0.2, 0.1;  // only x-direction observable
  const EstimateReport est = estimate_full(j, nullptr, VecX::Zero(4), 1e-6);
  CHECK(est.gram_condition > 1e4);

  std::mt19937_64 rng(14);
  const EstimateReport good =
      estimate_full(random_jacobian(rng, 8), nullptr, VecX::Zero(8), 1e-3);
  CHECK(good.gram_condition < 1e4);
}

TEST_CASE("estimator config validation") {
  EstimatorConfig bad;
  bad.lambda = -1.0;
  CHECK_THROWS(bad.validate());
  EstimatorConfig no_axes;
  no_axes.mode = EstimatorMode::AxisSet;
  CHECK_THROWS(no_axes.validate());
}
