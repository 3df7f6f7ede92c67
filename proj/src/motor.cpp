#include "complyctl/motor.hpp"

#include <cmath>
#include <stdexcept>

namespace complyctl {

double pwm_to_current(double pwm, double qdot, const MotorParams& params) {
  if (std::abs(pwm) > 1.0 + 1e-12) {
    throw std::runtime_error("motor: pwm duty outside [-1, 1]");
  }
  const double v_pwm = pwm * params.vbus;
  const double v_emf = qdot / params.kv;
  return (v_pwm - v_emf) / params.rw;
}

LoadTorque load_torque(double current, double qdot, const MotorParams& params,
                       DriveState previous) {
  const double tau_w = params.kt * current;
  DriveState drive = previous;
  if (std::abs(qdot) > params.eps_vel) {
    const double power = tau_w * qdot;
    if (power != 0.0) drive.d = (power > 0.0) ? 1.0 : -1.0;
  }
  LoadTorque out;
  out.drive = drive;
  out.torque = (drive.d > 0.0) ? params.eta * tau_w : tau_w / params.eta;
  return out;
}

double external_joint_torque(double tau_load, double tau_grav,
                             double gear_ratio) {
  if (!(gear_ratio > 0)) throw std::runtime_error("motor: gear ratio <= 0");
  return -(gear_ratio * tau_load - tau_grav);
}

TorqueEstimatorState::TorqueEstimatorState(int joints, double alpha_)
    : drive(joints), ema(VecX::Zero(joints)), alpha(alpha_) {
  if (alpha < 0.0 || alpha > 1.0) {
    throw std::runtime_error("motor: ema alpha outside [0, 1]");
  }
}

VecX ema_step(TorqueEstimatorState& state, const VecX& tau_raw) {
  if (tau_raw.size() != state.ema.size()) {
    throw std::runtime_error("motor: ema dimension mismatch");
  }
  state.ema = state.alpha * tau_raw + (1.0 - state.alpha) * state.ema;
  return state.ema;
}

namespace {

// Through-origin least squares y = s * x; returns slope and RMS residual.
std::pair<double, double> fit_through_origin(
    const std::vector<std::pair<double, double>>& xy) {
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : xy) {
    sxx += x * x;
    sxy += x * y;
  }
  if (sxx <= 0.0) throw DegenerateFit("degenerate fit: zero regressor");
  const double slope = sxy / sxx;
  double ss = 0.0;
  for (const auto& [x, y] : xy) {
    const double r = y - slope * x;
    ss += r * r;
  }
  return {slope, std::sqrt(ss / static_cast<double>(xy.size()))};
}

}  // namespace

FitReport calibrate_kv(const std::vector<std::pair<double, double>>& pwm_qdot,
                       double vbus) {
  int distinct_nonzero = 0;
  double first = 0.0;
  bool have_first = false;
  for (const auto& [pwm, qdot] : pwm_qdot) {
    (void)qdot;
    if (pwm == 0.0) continue;
    if (!have_first) {
      first = pwm;
      have_first = true;
      distinct_nonzero = 1;
    } else if (pwm != first) {
      distinct_nonzero = 2;
    }
  }
  if (pwm_qdot.size() < 2 || distinct_nonzero < 2) {
    throw DegenerateFit(
        "degenerate sweep: need >= 2 samples with distinct nonzero pwm");
  }
  std::vector<std::pair<double, double>> xy;
  xy.reserve(pwm_qdot.size());
  for (const auto& [pwm, qdot] : pwm_qdot) xy.emplace_back(pwm * vbus, qdot);
  const auto [slope, rms] = fit_through_origin(xy);
  if (!(slope > 0)) {
    throw DegenerateFit("degenerate sweep: fitted kv is non-positive");
  }
  FitReport report;
  report.value = slope;
  report.rms_residual = rms;
  report.samples = static_cast<int>(pwm_qdot.size());
  return report;
}

FitReport calibrate_rw(const std::vector<RwSample>& samples, double kv,
                       double vbus) {
  std::vector<std::pair<double, double>> xy;
  for (const RwSample& s : samples) {
    if (std::abs(s.current) < 1e-6) continue;
    xy.emplace_back(s.current, s.pwm * vbus - s.qdot / kv);
  }
  if (xy.empty()) {
    throw DegenerateFit("degenerate sweep: all currents below 1e-6 A");
  }
  const auto [slope, rms] = fit_through_origin(xy);
  if (!(slope > 0)) {
    throw DegenerateFit("degenerate sweep: fitted rw is non-positive");
  }
  FitReport report;
  report.value = slope;
  report.rms_residual = rms;
  report.samples = static_cast<int>(xy.size());
  return report;
}

namespace {

std::pair<double, double> branch_slope(
    const std::vector<std::pair<double, double>>& current_torque,
    const char* label) {
  if (current_torque.size() < 2) {
    throw DegenerateFit(std::string("degenerate fit: ") + label +
                             " branch needs >= 2 samples");
  }
  double lo = current_torque.front().first, hi = lo;
  for (const auto& [i, tau] : current_torque) {
    (void)tau;
    lo = std::min(lo, i);
    hi = std::max(hi, i);
  }
  if (lo == hi) {
    throw DegenerateFit(std::string("degenerate fit: ") + label +
                             " branch spans a single current");
  }
  return fit_through_origin(current_torque);
}

}  // namespace

KtEtaFit calibrate_kt_eta(
    const std::vector<std::pair<double, double>>& forward_current_torque,
    const std::vector<std::pair<double, double>>& backward_current_torque) {
  const auto [slope_f, rms_f] = branch_slope(forward_current_torque, "forward");
  const auto [slope_b, rms_b] =
      branch_slope(backward_current_torque, "backward");
  if (!(slope_f > 0) || !(slope_b > 0)) {
    throw DegenerateFit("degenerate fit: non-positive torque slope");
  }
  KtEtaFit fit;
  fit.kt = std::sqrt(slope_f * slope_b);
  fit.eta = std::sqrt(slope_f / slope_b);
  fit.rms_forward = rms_f;
  fit.rms_backward = rms_b;
  if (fit.eta > 1.0) {
    fit.eta = 1.0;
    fit.eta_clamped = true;
    fit.message =
        "calibration warning: forward slope exceeds backward slope "
        "(implies eta > 1); eta clamped to 1";
  }
  return fit;
}

FitReport calibrate_kt_forward(
    const std::vector<std::pair<double, double>>& forward_current_torque,
    double eta) {
  if (!(eta > 0) || eta > 1.0) {
    throw std::runtime_error("motor: eta must be in (0, 1]");
  }
  const auto [slope_f, rms_f] = branch_slope(forward_current_torque, "forward");
  FitReport report;
  report.value = slope_f / eta;
  report.rms_residual = rms_f;
  report.samples = static_cast<int>(forward_current_torque.size());
  return report;
}

}  // namespace complyctl
