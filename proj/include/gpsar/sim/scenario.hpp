#pragma once

#include <optional>
#include <string>

#include "gpsar/sim/sensors.hpp"
#include "gpsar/trajectory/planner.hpp"

namespace gpsar::sim {

// Scenario description: trajectory source, sensor rates and noise, true
// extrinsics and targets. Parsed from JSON by the io module.
struct ScenarioConfig {
  std::string source = "circle";  // circle | swing | planned
  CircleTruthConfig circle;
  SwingTruthConfig swing;
  double imu_rate = 1000.0;
  GnssEmitConfig gnss;
  double imu_sigma_a = 0.0;  // emission noise; estimator sigmas live in
  double imu_sigma_g = 0.0;  // the estimate config
  Vec3 true_accel_bias = Vec3::Zero();
  Vec3 true_gyro_bias = Vec3::Zero();
  Vec3 lever_pos = Vec3(0.1, -0.05, 0.3);
  Vec3 lever_mb = Vec3(-0.4, 0.05, 0.3);
  RadarEmitConfig radar;
  std::vector<Target> targets;
  double attitude_rate = 50.0;
  double attitude_noise = 0.003;  // rad
  uint64_t seed = 1;
};

struct ScenarioOutput {
  GroundTruth truth;
  est::SensorStreams streams;
  sar::PulseSet pulses;
  std::vector<std::pair<double, Rot3>> dji_attitude;
  std::vector<std::pair<double, double>> mask;
};

// Generates the ground truth and every sensor stream. For the "planned"
// source the caller provides the trajectory (from cmd_plan output).
ScenarioOutput run_scenario(const ScenarioConfig& config,
                            const traj::Trajectory* planned = nullptr);

}  // namespace gpsar::sim
