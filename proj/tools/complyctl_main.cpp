// complyctl: calibration, wrench-estimation replay, and closed-loop
// simulation scenarios for the sensorless compliance controller.
//
// Exit codes: 0 success, 1 input error, 2 numerical/degenerate failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "complyctl/io.hpp"
#include "complyctl/motor.hpp"
#include "complyctl/scenario.hpp"
#include "complyctl/svg.hpp"

namespace {

using namespace complyctl;
using nlohmann::json;

int log_level() {
  const char* env = std::getenv("COMPLYCTL_LOG");
  if (env == nullptr) return 1;
  const std::string level(env);
  if (level == "quiet") return 0;
  if (level == "debug") return 2;
  return 1;
}

void log_info(const std::string& msg) {
  if (log_level() >= 1) std::cerr << "[complyctl] " << msg << "\n";
}

int run_calibrate(const std::string& kind, const std::string& sweep_path,
                  const std::string& out_path, double vbus, double kv,
                  double eta) {
  const auto sweep = read_calibration_csv(sweep_path);
  json fragment;
  std::string report;
  char buf[256];

  if (kind == "kv") {
    std::vector<std::pair<double, double>> samples;
    for (const auto& s : sweep) {
      if (s.pwm && s.qdot) samples.emplace_back(*s.pwm, *s.qdot);
    }
    const FitReport fit = calibrate_kv(samples, vbus);
    fragment["kv"] = fit.value;
    std::snprintf(buf, sizeof(buf), "kv=%.12g rms_residual=%.12g samples=%d",
                  fit.value, fit.rms_residual, fit.samples);
    report = buf;
  } else if (kind == "rw") {
    if (!(kv > 0)) throw std::runtime_error("calibrate rw requires --kv");
    std::vector<RwSample> samples;
    for (const auto& s : sweep) {
      if (s.pwm && s.qdot && s.current) {
        samples.push_back({*s.pwm, *s.qdot, *s.current});
      }
    }
    const FitReport fit = calibrate_rw(samples, kv, vbus);
    fragment["rw"] = fit.value;
    std::snprintf(buf, sizeof(buf), "rw=%.12g rms_residual=%.12g samples=%d",
                  fit.value, fit.rms_residual, fit.samples);
    report = buf;
  } else if (kind == "kt") {
    // Branches split by power-flow sign; qdot and torque columns required.
    std::vector<std::pair<double, double>> forward, backward;
    for (const auto& s : sweep) {
      if (!s.current || !s.torque) continue;
      const bool fwd = !s.qdot || (*s.torque * *s.qdot >= 0);
      (fwd ? forward : backward).emplace_back(*s.current, *s.torque);
    }
    if (backward.empty() && eta > 0) {
      const FitReport fit = calibrate_kt_forward(forward, eta);
      fragment["kt"] = fit.value;
      fragment["eta"] = eta;
      std::snprintf(buf, sizeof(buf),
                    "kt=%.12g (forward-only, eta=%.12g supplied) "
                    "rms_residual=%.12g",
                    fit.value, eta, fit.rms_residual);
      report = buf;
    } else {
      const KtEtaFit fit = calibrate_kt_eta(forward, backward);
      fragment["kt"] = fit.kt;
      fragment["eta"] = fit.eta;
      std::snprintf(buf, sizeof(buf),
                    "kt=%.12g eta=%.12g rms_forward=%.12g rms_backward=%.12g",
                    fit.kt, fit.eta, fit.rms_forward, fit.rms_backward);
      report = buf;
      if (fit.eta_clamped) report += "\nwarning: " + fit.message;
    }
  } else {
    throw std::runtime_error("unknown calibration kind '" + kind + "'");
  }

  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write '" + out_path + "'");
  out << fragment.dump(2) << "\n";
  std::cout << report << "\n";
  log_info("wrote " + out_path);
  return 0;
}

int run_estimate(const std::string& telemetry_path,
                 const std::string& chain_path, const std::string& config_path,
                 const std::string& out_path) {
  const ChainModel chain = load_chain(chain_path);
  const TelemetryFile input = read_telemetry_file(telemetry_path);
  ControllerConfig config;
  if (!config_path.empty()) config = load_controller_config(config_path);
  if (config.sites.empty()) config.sites = {chain.site_count() - 1};

  const int n = chain.joint_count();
  if (input.samples[0].q.size() != n) {
    throw std::runtime_error("telemetry joint count does not match chain");
  }

  TorqueEstimatorState state(n, config.ema_alpha);
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write '" + out_path + "'");
  out.precision(17);
  out << "# complyctl wrench-trace v1\n";
  out << "t";
  for (int s : config.sites) {
    for (const char* c : {"fx", "fy", "fz", "tx", "ty", "tz"}) {
      out << ",s" << s << "_fext_" << c;
    }
  }
  out << ",gram_cond\n";

  double abs_err = 0.0;
  int err_count = 0;
  for (size_t r = 0; r < input.samples.size(); ++r) {
    const Telemetry& sample = input.samples[r];
    const VecX tau_grav = gravity_torques(chain, sample.q);
    VecX tau_ext(n);
    for (int i = 0; i < n; ++i) {
      const MotorParams& motor = chain.motor(i);
      const double current =
          sample.is_current
              ? sample.drive[i]
              : pwm_to_current(sample.drive[i], sample.qdot[i], motor);
      const LoadTorque load =
          load_torque(current, sample.qdot[i], motor, state.drive[i]);
      state.drive[i] = load.drive;
      tau_ext[i] = external_joint_torque(load.torque, tau_grav[i],
                                         chain.joints[i].gear_ratio);
    }
    const VecX tau_filtered = ema_step(state, tau_ext);

    out << sample.t;
    double cond = 1.0;
    for (size_t k = 0; k < config.sites.size(); ++k) {
      const SiteJacobian jac = jacobian(chain, sample.q, config.sites[k]);
      const EstimateReport est =
          estimate(config.estimator, jac.linear, jac.angular, tau_filtered);
      cond = std::max(cond, est.gram_condition);
      const Vec6 w = est.wrench.vector();
      for (int i = 0; i < 6; ++i) out << "," << w[i];
      if (k == 0 && !input.truth.empty()) {
        abs_err += (est.wrench.force - input.truth[r].force).cwiseAbs().sum();
        err_count += 3;
      }
    }
    out << "," << cond << "\n";
  }

  char buf[128];
  std::snprintf(buf, sizeof(buf), "rows=%zu", input.samples.size());
  std::cout << buf << "\n";
  if (err_count > 0) {
    std::snprintf(buf, sizeof(buf), "mae_vs_truth=%.9g N",
                  abs_err / err_count);
    std::cout << buf << "\n";
  }
  log_info("wrote " + out_path);
  return 0;
}

const char* variant_name(ControlVariant v) {
  switch (v) {
    case ControlVariant::Full: return "full";
    case ControlVariant::NoExternalWrench: return "no-fext";
    case ControlVariant::PositionOnly: return "position";
  }
  return "?";
}

int run_sim(const std::string& scenario_path, uint64_t seed,
            const std::string& out_dir, bool plot,
            const std::string& controller_variant) {
  Scenario scenario = load_scenario(scenario_path);
  ControlVariant variant = ControlVariant::Full;
  if (controller_variant == "no-fext") {
    variant = ControlVariant::NoExternalWrench;
  } else if (controller_variant == "position" ||
             controller_variant == "none") {
    variant = ControlVariant::PositionOnly;
  } else if (controller_variant != "full") {
    throw std::runtime_error("unknown --controller '" + controller_variant +
                             "'");
  }
  scenario.control.variant = variant;
  scenario.press.control.variant = variant;
  scenario.draw.control.variant = variant;

  std::filesystem::create_directories(out_dir);
  const auto out_file = [&](const std::string& name) {
    return (std::filesystem::path(out_dir) / name).string();
  };
  std::ofstream summary(out_file("summary.txt"));
  if (!summary) throw std::runtime_error("cannot write summary");
  char buf[256];

  SimWorld world = scenario.make_world(seed);
  summary << "# complyctl summary v1\n";
  summary << "scenario=" << scenario.type << "\n";
  summary << "seed=" << seed << "\n";
  summary << "controller=" << variant_name(variant) << "\n";

  if (scenario.type == "press") {
    const PressResult result = scenario_press(world, scenario.press);
    std::snprintf(buf, sizeof(buf), "samples=%zu\nmae=%.9g N\n",
                  result.t.size(), result.mae);
    summary << buf;

    std::ofstream trace(out_file("trace.csv"));
    trace.precision(17);
    trace << "# complyctl press-trace v1\n";
    trace << "t,fhat_x,fhat_y,fhat_z,f_true_x,f_true_y,f_true_z\n";
    for (size_t i = 0; i < result.t.size(); ++i) {
      trace << result.t[i];
      for (int k = 0; k < 3; ++k) trace << "," << result.estimated[i][k];
      for (int k = 0; k < 3; ++k) trace << "," << result.truth[i][k];
      trace << "\n";
    }
    if (plot) {
      std::vector<SvgSeries> series;
      const char* names[3] = {"x", "y", "z"};
      const char* colors[3] = {"#d62728", "#2ca02c", "#1f77b4"};
      for (int k = 0; k < 3; ++k) {
        SvgSeries est{std::string("fhat_") + names[k], colors[k], true, {}, {}};
        SvgSeries tru{std::string("f_true_") + names[k], colors[k], false,
                      {}, {}};
        for (size_t i = 0; i < result.t.size(); ++i) {
          est.x.push_back(result.t[i]);
          est.y.push_back(result.estimated[i][k]);
          tru.x.push_back(result.t[i]);
          tru.y.push_back(result.truth[i][k]);
        }
        series.push_back(std::move(tru));
        series.push_back(std::move(est));
      }
      write_svg_plot(out_file("forces.svg"), "estimated vs true force [N]",
                     series);
    }
  } else {
    const DrawResult result = scenario_draw(world, scenario.draw);
    std::snprintf(buf, sizeof(buf),
                  "ticks=%d\ncommanded_force=%.9g N\nmean_normal_force=%.9g N\n"
                  "peak_normal_force=%.9g N\nmean_force_error=%.9g N\n",
                  result.ticks, result.commanded_force,
                  result.mean_normal_force, result.peak_normal_force,
                  result.mean_force_error);
    summary << buf;
    std::snprintf(buf, sizeof(buf),
                  "mean_tangential_error=%.9g m\nmax_tangential_error=%.9g m\n"
                  "contact_fraction=%.9g\ncontact_loss=%s\n",
                  result.mean_tangential_error, result.max_tangential_error,
                  result.contact_fraction, result.contact_loss ? "yes" : "no");
    summary << buf;
    if (plot) {
      // Board-plane projection: the two world axes most orthogonal to
      // the surface normal.
      const Vec3 n = scenario.draw.surface.normal;
      int drop = 0;
      for (int k = 1; k < 3; ++k) {
        if (std::abs(n[k]) > std::abs(n[drop])) drop = k;
      }
      const int a = (drop + 1) % 3, b = (drop + 2) % 3;
      SvgSeries desired{"desired", "#888888", true, {}, {}};
      SvgSeries actual{"site", "#d62728", false, {}, {}};
      for (size_t i = 0; i < result.site_path.size(); ++i) {
        desired.x.push_back(result.desired_path[i][a]);
        desired.y.push_back(result.desired_path[i][b]);
        actual.x.push_back(result.site_path[i][a]);
        actual.y.push_back(result.site_path[i][b]);
      }
      write_svg_plot(out_file("path.svg"), "drawing path [m]",
                     {desired, actual});
      SvgSeries fn{"normal force", "#1f77b4", false, result.t,
                   result.normal_force};
      write_svg_plot(out_file("force.svg"), "normal contact force [N]", {fn});
    }
  }
  log_info("wrote " + out_file("summary.txt"));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sensorless task-space compliance control toolkit"};
  app.require_subcommand(1);

  std::string kind, sweep, chain, config, telemetry, scenario;
  std::string out = "out";
  std::string controller = "full";
  double vbus = 12.0, kv = 0.0, eta = 0.0;
  uint64_t seed = 0;
  bool plot = false;

  auto* cal = app.add_subcommand("calibrate", "fit motor parameters");
  cal->add_option("--kind", kind, "kv|rw|kt")->required();
  cal->add_option("--sweep", sweep, "sweep CSV")->required();
  cal->add_option("--out", out, "parameter fragment output")->required();
  cal->add_option("--vbus", vbus, "bus voltage, V");
  cal->add_option("--kv", kv, "known kv (for rw fits)");
  cal->add_option("--eta", eta, "manufacturer eta (forward-only kt fits)");

  auto* est = app.add_subcommand("estimate", "offline wrench replay");
  est->add_option("--telemetry", telemetry, "telemetry CSV")->required();
  est->add_option("--chain", chain, "chain description JSON")->required();
  est->add_option("--config", config, "controller config JSON");
  est->add_option("--out", out, "wrench trace output")->required();

  auto* sim = app.add_subcommand("sim", "closed-loop scenario run");
  sim->add_option("--scenario", scenario, "scenario JSON")->required();
  sim->add_option("--seed", seed, "rng seed");
  sim->add_option("--out", out, "output directory");
  sim->add_flag("--plot", plot, "emit SVG plots");
  sim->add_option("--controller", controller, "full|no-fext|position");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cal->parsed()) return run_calibrate(kind, sweep, out, vbus, kv, eta);
    if (est->parsed()) return run_estimate(telemetry, chain, config, out);
    if (sim->parsed()) return run_sim(scenario, seed, out, plot, controller);
  } catch (const complyctl::DegenerateFit& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
