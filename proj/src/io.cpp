#include "complyctl/io.hpp"

#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace complyctl {

namespace {

using nlohmann::json;

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("io: cannot write '" + path + "'");
  out.precision(17);
  return out;
}

struct CsvReader {
  std::ifstream in;
  std::string path;
  int line_no = 0;

  explicit CsvReader(const std::string& p) : in(p), path(p) {
    if (!in) throw std::runtime_error("io: cannot open '" + p + "'");
  }

  // Next non-comment line, or nullopt at EOF.
  std::optional<std::string> next() {
    std::string line;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      return line;
    }
    return std::nullopt;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw std::runtime_error("io: " + path + ":" + std::to_string(line_no) +
                             ": " + what);
  }
};

double parse_double(const CsvReader& reader, const std::string& cell) {
  try {
    size_t pos = 0;
    const double v = std::stod(cell, &pos);
    if (pos != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    const_cast<CsvReader&>(reader).fail("bad number '" + cell + "'");
  }
}

}  // namespace

void write_telemetry_csv(const std::string& path,
                         const std::vector<Telemetry>& telemetry,
                         const std::vector<Wrench>* truth) {
  auto out = open_out(path);
  out << "# complyctl telemetry v1\n";
  const int n = telemetry.empty() ? 0 : static_cast<int>(telemetry[0].q.size());
  const bool is_current = !telemetry.empty() && telemetry[0].is_current;
  out << "t";
  for (int i = 0; i < n; ++i) out << ",q" << i;
  for (int i = 0; i < n; ++i) out << ",qdot" << i;
  for (int i = 0; i < n; ++i) out << "," << (is_current ? "cur" : "pwm") << i;
  if (truth != nullptr) {
    for (const char* c : {"fx", "fy", "fz", "tx", "ty", "tz"}) {
      out << ",f_true_" << c;
    }
  }
  out << "\n";
  for (size_t r = 0; r < telemetry.size(); ++r) {
    const Telemetry& sample = telemetry[r];
    out << sample.t;
    for (int i = 0; i < n; ++i) out << "," << sample.q[i];
    for (int i = 0; i < n; ++i) out << "," << sample.qdot[i];
    for (int i = 0; i < n; ++i) out << "," << sample.drive[i];
    if (truth != nullptr) {
      const Vec6 w = (*truth)[r].vector();
      for (int i = 0; i < 6; ++i) out << "," << w[i];
    }
    out << "\n";
  }
}

TelemetryFile read_telemetry_file(const std::string& path) {
  CsvReader reader(path);
  const auto header = reader.next();
  if (!header) reader.fail("empty telemetry file");
  const auto cols = split(*header, ',');
  if (cols.empty() || cols[0] != "t") reader.fail("expected 't' column first");
  size_t data_cols = cols.size();
  bool has_truth = false;
  if (cols.size() > 6 && cols[cols.size() - 6].rfind("f_true_", 0) == 0) {
    has_truth = true;
    data_cols -= 6;
  }
  if ((data_cols - 1) % 3 != 0) reader.fail("expected t,q*,qdot*,pwm|cur*");
  const int n = static_cast<int>((data_cols - 1) / 3);
  if (n == 0) reader.fail("no joint columns");
  const bool is_current = cols[1 + 2 * n].rfind("cur", 0) == 0;

  TelemetryFile out;
  double last_t = -std::numeric_limits<double>::infinity();
  while (const auto line = reader.next()) {
    const auto cells = split(*line, ',');
    if (cells.size() != cols.size()) reader.fail("wrong column count");
    Telemetry sample;
    sample.t = parse_double(reader, cells[0]);
    if (sample.t < last_t) reader.fail("time not monotone");
    last_t = sample.t;
    sample.q = VecX(n);
    sample.qdot = VecX(n);
    sample.drive = VecX(n);
    sample.is_current = is_current;
    for (int i = 0; i < n; ++i) {
      sample.q[i] = parse_double(reader, cells[1 + i]);
      sample.qdot[i] = parse_double(reader, cells[1 + n + i]);
      sample.drive[i] = parse_double(reader, cells[1 + 2 * n + i]);
    }
    if (has_truth) {
      Vec6 w;
      for (int i = 0; i < 6; ++i) {
        w[i] = parse_double(reader, cells[1 + 3 * n + i]);
      }
      out.truth.push_back(Wrench::from_vector(w));
    }
    out.samples.push_back(std::move(sample));
  }
  if (out.samples.empty()) reader.fail("no telemetry rows");
  return out;
}

std::vector<Telemetry> read_telemetry_csv(const std::string& path) {
  return read_telemetry_file(path).samples;
}

std::vector<CalibrationSample> read_calibration_csv(const std::string& path) {
  CsvReader reader(path);
  const auto header = reader.next();
  if (!header) reader.fail("empty sweep file");
  if (split(*header, ',') !=
      std::vector<std::string>{"t", "pwm", "qdot", "current", "torque"}) {
    reader.fail("expected header 't,pwm,qdot,current,torque'");
  }
  std::vector<CalibrationSample> out;
  while (const auto line = reader.next()) {
    const auto cells = split(*line, ',');
    if (cells.size() != 5) reader.fail("expected 5 columns");
    CalibrationSample s;
    s.t = parse_double(reader, cells[0]);
    const auto opt = [&](const std::string& cell) -> std::optional<double> {
      if (cell.empty()) return std::nullopt;
      return parse_double(reader, cell);
    };
    s.pwm = opt(cells[1]);
    s.qdot = opt(cells[2]);
    s.current = opt(cells[3]);
    s.torque = opt(cells[4]);
    out.push_back(s);
  }
  if (out.empty()) reader.fail("no sweep rows");
  return out;
}

void write_trace_csv(const std::string& path,
                     const std::vector<TraceRecord>& records,
                     const std::vector<Wrench>* truth) {
  auto out = open_out(path);
  out << "# complyctl trace v1\n";
  const int n = records.empty() ? 0 : static_cast<int>(records[0].q.size());
  const int sites =
      records.empty() ? 0 : static_cast<int>(records[0].x_ref.size());
  out << "t";
  for (int i = 0; i < n; ++i) out << ",q" << i;
  for (int i = 0; i < n; ++i) out << ",qt" << i;
  static constexpr const char* kPose[] = {"x", "y", "z", "rx", "ry", "rz"};
  static constexpr const char* kWrench[] = {"fx", "fy", "fz",
                                            "tx", "ty", "tz"};
  for (int s = 0; s < sites; ++s) {
    for (const char* c : kPose) out << ",s" << s << "_ref_" << c;
    for (const char* c : kPose) out << ",s" << s << "_des_" << c;
    for (const char* c : kWrench) out << ",s" << s << "_fext_" << c;
    for (const char* c : kWrench) out << ",s" << s << "_fcmd_" << c;
  }
  if (truth != nullptr) {
    for (const char* c : kWrench) out << ",f_true_" << c;
  }
  out << ",gram_cond,fault\n";

  for (size_t r = 0; r < records.size(); ++r) {
    const TraceRecord& rec = records[r];
    out << rec.t;
    for (int i = 0; i < n; ++i) out << "," << rec.q[i];
    for (int i = 0; i < n; ++i) out << "," << rec.q_target[i];
    for (int s = 0; s < sites; ++s) {
      const auto put_pose = [&](const Pose& p) {
        for (int i = 0; i < 3; ++i) out << "," << p.position[i];
        for (int i = 0; i < 3; ++i) out << "," << p.orientation[i];
      };
      const auto put_wrench = [&](const Wrench& w) {
        for (int i = 0; i < 6; ++i) out << "," << w.vector()[i];
      };
      put_pose(rec.x_ref[s]);
      put_pose(rec.x_des[s]);
      put_wrench(rec.f_ext[s]);
      put_wrench(rec.f_cmd[s]);
    }
    if (truth != nullptr) {
      const Vec6 w = (*truth)[r].vector();
      for (int i = 0; i < 6; ++i) out << "," << w[i];
    }
    out << "," << rec.gram_condition << "," << (rec.fault ? 1 : 0) << "\n";
  }
}

ControllerConfig parse_controller_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("config: parse error: ") + e.what());
  }
  ControllerConfig config;
  try {
    config.dt = root.value("dt", config.dt);
    config.ema_alpha = root.value("ema_alpha", config.ema_alpha);
    if (root.contains("estimator")) {
      const auto& est = root.at("estimator");
      config.estimator.lambda =
          est.value("lambda", config.estimator.lambda);
      const std::string mode = est.value("mode", "full-force");
      if (mode == "full-force") {
        config.estimator.mode = EstimatorMode::FullForce;
      } else if (mode == "full-wrench") {
        config.estimator.mode = EstimatorMode::FullWrench;
      } else if (mode == "axis-set") {
        config.estimator.mode = EstimatorMode::AxisSet;
      } else {
        throw std::runtime_error("config: unknown estimator mode '" + mode +
                                 "'");
      }
      config.estimator.stacked = est.value("stacked", true);
      for (const auto& node : est.value("axes", json::array())) {
        EstimatorAxis axis;
        const auto& a = node.at("axis");
        axis.axis = Vec3(a[0].get<double>(), a[1].get<double>(),
                         a[2].get<double>());
        axis.kind = node.value("kind", std::string("force")) == "torque"
                        ? AxisKind::Torque
                        : AxisKind::Force;
        config.estimator.axes.push_back(axis);
      }
    }
    if (root.contains("ik")) {
      const auto& ik = root.at("ik");
      config.ik.damping = ik.value("damping", config.ik.damping);
      config.ik.max_joint_step =
          ik.value("max_joint_step", config.ik.max_joint_step);
      config.ik.position_weight =
          ik.value("position_weight", config.ik.position_weight);
      config.ik.orientation_weight =
          ik.value("orientation_weight", config.ik.orientation_weight);
      config.ik.max_iterations =
          ik.value("max_iterations", config.ik.max_iterations);
      config.ik.tolerance = ik.value("tolerance", config.ik.tolerance);
    }
    if (root.contains("limits")) {
      const auto& lim = root.at("limits");
      config.limits.max_linear_velocity = lim.value(
          "max_linear_velocity", config.limits.max_linear_velocity);
      config.limits.max_angular_velocity = lim.value(
          "max_angular_velocity", config.limits.max_angular_velocity);
    }
    if (root.contains("sites")) {
      config.sites = root.at("sites").get<std::vector<int>>();
    }
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("config: schema error: ") + e.what());
  }
  config.validate();
  return config;
}

ControllerConfig load_controller_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_controller_config(buffer.str());
}

}  // namespace complyctl
