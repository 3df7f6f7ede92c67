#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "complyctl/chain.hpp"

namespace complyctl {

// Raised when a calibration sweep cannot identify the parameter
// (distinct from malformed input, which raises runtime_error).
struct DegenerateFit : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Forward/backward drive direction; starts in forward drive.
struct DriveState {
  double d = 1.0;  // +1 forward, -1 backward
};

// Winding current from PWM duty and back-EMF. Throws if |pwm| > 1.
double pwm_to_current(double pwm, double qdot, const MotorParams& params);

struct LoadTorque {
  double torque = 0.0;  // motor-side output torque, N*m
  DriveState drive;
};

// Direction-dependent transmission gain. sign(0) power flow keeps the
// previous drive state; |qdot| <= eps_vel debounces to the previous state.
LoadTorque load_torque(double current, double qdot, const MotorParams& params,
                       DriveState previous);

// tau_ext = -(r * tau_load - tau_grav), joint side.
double external_joint_torque(double tau_load, double tau_grav,
                             double gear_ratio);

// Per-joint drive states plus EMA-filtered external torques.
// Owned by exactly one control loop; calibration routines are pure.
struct TorqueEstimatorState {
  std::vector<DriveState> drive;
  VecX ema;
  double alpha = 0.9;  // larger = more responsive, noisier

  explicit TorqueEstimatorState(int joints = 0, double alpha_ = 0.9);
};

// y <- alpha * tau_raw + (1 - alpha) * y, per joint. Returns the
// filtered vector and updates the state.
VecX ema_step(TorqueEstimatorState& state, const VecX& tau_raw);

struct FitReport {
  double value = 0.0;
  double rms_residual = 0.0;
  int samples = 0;
  bool warning = false;
  std::string message;
};

// Least-squares fit of qdot = kv * pwm * vbus from a no-load sweep.
// Throws on a degenerate sweep (fewer than 2 distinct nonzero duties).
FitReport calibrate_kv(const std::vector<std::pair<double, double>>& pwm_qdot,
                       double vbus);

struct RwSample {
  double pwm = 0.0;
  double qdot = 0.0;
  double current = 0.0;
};

// Slope of (pwm*vbus - qdot/kv) vs current, through the origin.
FitReport calibrate_rw(const std::vector<RwSample>& samples, double kv,
                       double vbus);

struct KtEtaFit {
  double kt = 0.0;
  double eta = 0.0;
  double rms_forward = 0.0;
  double rms_backward = 0.0;
  bool eta_clamped = false;
  std::string message;
};

// Geometric-mean factorization of the forward (tau = eta*kt*I) and
// backward (tau = kt*I/eta) slopes. eta > 1 is clamped with a warning.
KtEtaFit calibrate_kt_eta(
    const std::vector<std::pair<double, double>>& forward_current_torque,
    const std::vector<std::pair<double, double>>& backward_current_torque);

// Forward-branch-only fallback with a supplied efficiency.
FitReport calibrate_kt_forward(
    const std::vector<std::pair<double, double>>& forward_current_torque,
    double eta);

}  // namespace complyctl
