#include <fstream>

#include <nlohmann/json.hpp>

#include "gpsar/io/config_io.hpp"

namespace gpsar::io {

namespace {

using nlohmann::json;

json load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

Vec3 vec3_of(const json& j, const std::string& field) {
  if (!j.contains(field) || !j[field].is_array() || j[field].size() != 3) {
    throw ConfigError("field '" + field + "' must be a 3-array");
  }
  return Vec3(j[field][0], j[field][1], j[field][2]);
}

double num_or(const json& j, const std::string& field, double fallback) {
  return j.contains(field) ? j[field].get<double>() : fallback;
}

}  // namespace

traj::MissionConfig read_mission(const std::string& path) {
  const json j = load(path);
  traj::MissionConfig config;
  const double speed = num_or(j, "speed", 1.0);
  const double deviation = num_or(j, "deviation", 0.02);

  if (j.contains("limits")) {
    const json& l = j["limits"];
    config.limits.f_min = num_or(l, "f_min", config.limits.f_min);
    config.limits.f_max = num_or(l, "f_max", config.limits.f_max);
    config.limits.v_max = num_or(l, "v_max", config.limits.v_max);
    config.limits.tilt_rate_max =
        num_or(l, "tilt_rate_max", config.limits.tilt_rate_max);
    config.limits.yaw_acc_max =
        num_or(l, "yaw_acc_max", config.limits.yaw_acc_max);
  }
  if (!j.contains("primitives") || !j["primitives"].is_array()) {
    throw ConfigError(path + ": missing 'primitives' array");
  }
  for (const auto& p : j["primitives"]) {
    const std::string type = p.value("type", "");
    if (type == "circle") {
      traj::CirclePlan plan;
      plan.center = vec3_of(p, "center");
      plan.radius = num_or(p, "radius", plan.radius);
      plan.start_angle = num_or(p, "start_angle", plan.start_angle);
      plan.angle = num_or(p, "angle", plan.angle);
      plan.speed = num_or(p, "speed", speed);
      plan.deviation = num_or(p, "deviation", deviation);
      config.primitives.emplace_back(plan);
    } else if (type == "stripmap") {
      traj::StripmapPlan plan;
      plan.start = vec3_of(p, "start");
      plan.end = vec3_of(p, "end");
      plan.speed = num_or(p, "speed", speed);
      config.primitives.emplace_back(plan);
    } else {
      throw ConfigError(path + ": primitive type must be circle or stripmap");
    }
  }
  return config;
}

void write_trajectory(const std::string& path, const traj::Trajectory& traj) {
  json segments = json::array();
  for (const auto& seg : traj.segments) {
    json coeffs = json::array();
    for (int axis = 0; axis < 3; ++axis) {
      json axis_coeffs = json::array();
      for (int k = 0; k < traj::kPosCoeffs; ++k) {
        axis_coeffs.push_back(seg.pos_coeffs(k, axis));
      }
      coeffs.push_back(axis_coeffs);
    }
    json yaw = json::array();
    for (int k = 0; k < traj::kYawCoeffs; ++k) {
      yaw.push_back(seg.yaw_coeffs(k));
    }
    segments.push_back({{"duration", seg.duration},
                        {"kind", traj::to_string(seg.kind)},
                        {"pos_coeffs", coeffs},
                        {"yaw_coeffs", yaw}});
  }
  const json j{{"start_time", traj.start_time}, {"segments", segments}};
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path);
  out << j.dump(2) << "\n";
}

traj::Trajectory read_trajectory(const std::string& path) {
  const json j = load(path);
  traj::Trajectory traj;
  traj.start_time = num_or(j, "start_time", 0.0);
  for (const auto& s : j.at("segments")) {
    traj::PolySegment seg;
    seg.duration = s.at("duration").get<double>();
    const std::string kind = s.at("kind").get<std::string>();
    if (kind == "measurement") {
      seg.kind = traj::SegmentKind::kMeasurement;
    } else if (kind == "accelerate") {
      seg.kind = traj::SegmentKind::kAccelerate;
    } else if (kind == "decelerate") {
      seg.kind = traj::SegmentKind::kDecelerate;
    } else if (kind == "transfer") {
      seg.kind = traj::SegmentKind::kTransfer;
    } else {
      throw ConfigError(path + ": unknown segment kind " + kind);
    }
    const auto& coeffs = s.at("pos_coeffs");
    for (int axis = 0; axis < 3; ++axis) {
      for (int k = 0; k < traj::kPosCoeffs; ++k) {
        seg.pos_coeffs(k, axis) = coeffs[axis][k].get<double>();
      }
    }
    const auto& yaw = s.at("yaw_coeffs");
    for (int k = 0; k < traj::kYawCoeffs; ++k) {
      seg.yaw_coeffs(k) = yaw[k].get<double>();
    }
    traj.segments.push_back(seg);
  }
  return traj;
}

void write_mask(const std::string& path,
                const std::vector<std::pair<double, double>>& mask) {
  json windows = json::array();
  for (const auto& [a, b] : mask) windows.push_back({a, b});
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path);
  out << json{{"windows", windows}}.dump(2) << "\n";
}

std::vector<std::pair<double, double>> read_mask(const std::string& path) {
  const json j = load(path);
  std::vector<std::pair<double, double>> mask;
  for (const auto& w : j.at("windows")) {
    mask.emplace_back(w[0].get<double>(), w[1].get<double>());
  }
  return mask;
}

sim::ScenarioConfig read_scenario(const std::string& path) {
  const json j = load(path);
  sim::ScenarioConfig config;
  config.source = j.value("source", config.source);
  config.seed = j.value("seed", config.seed);
  config.imu_rate = num_or(j, "imu_rate", config.imu_rate);

  if (j.contains("circle")) {
    const json& c = j["circle"];
    config.circle.center = c.contains("center") ? vec3_of(c, "center")
                                                : config.circle.center;
    config.circle.radius = num_or(c, "radius", config.circle.radius);
    config.circle.speed = num_or(c, "speed", config.circle.speed);
    config.circle.start_angle =
        num_or(c, "start_angle", config.circle.start_angle);
    config.circle.standstill =
        num_or(c, "standstill", config.circle.standstill);
    config.circle.ramp = num_or(c, "ramp", config.circle.ramp);
    config.circle.duration = num_or(c, "duration", config.circle.duration);
    config.circle.alt_amplitude =
        num_or(c, "alt_amplitude", config.circle.alt_amplitude);
    config.circle.alt_period =
        num_or(c, "alt_period", config.circle.alt_period);
    config.circle.wobble_deg =
        num_or(c, "wobble_deg", config.circle.wobble_deg);
    config.circle.wobble_hz = num_or(c, "wobble_hz", config.circle.wobble_hz);
    config.circle.rate = config.imu_rate;
  }
  if (j.contains("swing")) {
    const json& s = j["swing"];
    config.swing.duration = num_or(s, "duration", config.swing.duration);
    config.swing.accel_peak =
        num_or(s, "accel_peak", config.swing.accel_peak);
    config.swing.attitude_peak_deg =
        num_or(s, "attitude_peak_deg", config.swing.attitude_peak_deg);
    config.swing.rate = config.imu_rate;
  }
  if (j.contains("gnss")) {
    const json& g = j["gnss"];
    config.gnss.pos_rate = num_or(g, "pos_rate", config.gnss.pos_rate);
    config.gnss.mb_rate = num_or(g, "mb_rate", config.gnss.mb_rate);
    config.gnss.start_time = num_or(g, "start_time", config.gnss.start_time);
    config.gnss.pos_noise_std =
        num_or(g, "pos_noise_std", config.gnss.pos_noise_std);
    config.gnss.mb_noise_std =
        num_or(g, "mb_noise_std", config.gnss.mb_noise_std);
  }
  config.imu_sigma_a = num_or(j, "imu_sigma_a", config.imu_sigma_a);
  config.imu_sigma_g = num_or(j, "imu_sigma_g", config.imu_sigma_g);
  if (j.contains("true_accel_bias")) {
    config.true_accel_bias = vec3_of(j, "true_accel_bias");
  }
  if (j.contains("true_gyro_bias")) {
    config.true_gyro_bias = vec3_of(j, "true_gyro_bias");
  }
  if (j.contains("lever_pos")) config.lever_pos = vec3_of(j, "lever_pos");
  if (j.contains("lever_mb")) config.lever_mb = vec3_of(j, "lever_mb");

  if (j.contains("radar")) {
    const json& r = j["radar"];
    config.radar.rate = num_or(r, "rate", config.radar.rate);
    config.radar.bandwidth = num_or(r, "bandwidth", config.radar.bandwidth);
    config.radar.noise_std = num_or(r, "noise_std", config.radar.noise_std);
    config.radar.header.num_bins =
        static_cast<int>(num_or(r, "num_bins", config.radar.header.num_bins));
    config.radar.header.bin_spacing =
        num_or(r, "bin_spacing", config.radar.header.bin_spacing);
    config.radar.header.start_range =
        num_or(r, "start_range", config.radar.header.start_range);
    config.radar.sar.f_c = num_or(r, "f_c", config.radar.sar.f_c);
    config.radar.sar.eps_r = num_or(r, "eps_r", config.radar.sar.eps_r);
    config.radar.sar.surface_z =
        num_or(r, "surface_z", config.radar.sar.surface_z);
    if (r.contains("tx_lever")) {
      config.radar.tx_extrinsic = Pose3(Rot3(), vec3_of(r, "tx_lever"));
    }
    if (r.contains("rx_lever")) {
      config.radar.rx_extrinsic = Pose3(Rot3(), vec3_of(r, "rx_lever"));
    } else {
      config.radar.rx_extrinsic = config.radar.tx_extrinsic;
    }
  }
  if (j.contains("targets")) {
    for (const auto& t : j["targets"]) {
      sim::Target target;
      target.position = vec3_of(t, "position");
      target.reflectivity = num_or(t, "reflectivity", 1.0);
      config.targets.push_back(target);
    }
  }
  return config;
}

est::EstimatorOptions default_estimator_options() {
  est::EstimatorOptions opts;
  opts.lever_prior << 0.1, -0.05, 0.3, -0.4, 0.05, 0.3;
  return opts;
}

est::EstimatorOptions read_estimator_options(const std::string& path) {
  const json j = load(path);
  est::EstimatorOptions opts = default_estimator_options();
  opts.window = num_or(j, "window", opts.window);
  opts.use_moving_baseline =
      j.value("use_moving_baseline", opts.use_moving_baseline);
  opts.heading_offset = num_or(j, "heading_offset", opts.heading_offset);
  if (j.contains("lever_pos_prior")) {
    opts.lever_prior.head<3>() = vec3_of(j, "lever_pos_prior");
  }
  if (j.contains("lever_mb_prior")) {
    opts.lever_prior.tail<3>() = vec3_of(j, "lever_mb_prior");
  }
  if (j.contains("noise")) {
    const json& n = j["noise"];
    auto& c = opts.noise;
    c.sigma_a = num_or(n, "sigma_a", c.sigma_a);
    c.sigma_g = num_or(n, "sigma_g", c.sigma_g);
    c.sigma_ba = num_or(n, "sigma_ba", c.sigma_ba);
    c.sigma_bg = num_or(n, "sigma_bg", c.sigma_bg);
    c.prior_pos_std = num_or(n, "prior_pos_std", c.prior_pos_std);
    c.prior_vel_std = num_or(n, "prior_vel_std", c.prior_vel_std);
    c.prior_rot_std = num_or(n, "prior_rot_std", c.prior_rot_std);
    c.prior_yaw_std = num_or(n, "prior_yaw_std", c.prior_yaw_std);
    c.prior_ba_std = num_or(n, "prior_ba_std", c.prior_ba_std);
    c.prior_bg_std = num_or(n, "prior_bg_std", c.prior_bg_std);
    c.prior_lever_std = num_or(n, "prior_lever_std", c.prior_lever_std);
  }
  return opts;
}

}  // namespace gpsar::io
