#pragma once

#include <optional>
#include <string>
#include <vector>

#include "complyctl/controller.hpp"

namespace complyctl {

// CSV schemas carry a versioned comment line ("# complyctl <kind> v1")
// followed by a column header. Readers skip '#' lines.

// Optional trailing f_true_{fx..tz} columns carry a reference wrench
// (sim ground truth) alongside each sample.
struct TelemetryFile {
  std::vector<Telemetry> samples;
  std::vector<Wrench> truth;  // empty when absent
};

void write_telemetry_csv(const std::string& path,
                         const std::vector<Telemetry>& telemetry,
                         const std::vector<Wrench>* truth = nullptr);
TelemetryFile read_telemetry_file(const std::string& path);
std::vector<Telemetry> read_telemetry_csv(const std::string& path);

// Calibration sweep: t,pwm,qdot,current,torque with unused cells empty.
struct CalibrationSample {
  double t = 0.0;
  std::optional<double> pwm;
  std::optional<double> qdot;
  std::optional<double> current;
  std::optional<double> torque;
};
std::vector<CalibrationSample> read_calibration_csv(const std::string& path);

// Trace CSV; `truth` (one wrench per record, first controlled site)
// adds f_true_* columns when present.
void write_trace_csv(const std::string& path,
                     const std::vector<TraceRecord>& records,
                     const std::vector<Wrench>* truth = nullptr);

ControllerConfig parse_controller_config(const std::string& json_text);
ControllerConfig load_controller_config(const std::string& path);

}  // namespace complyctl
