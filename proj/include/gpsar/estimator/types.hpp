#pragma once

#include <optional>
#include <vector>

#include "gpsar/core/pose3.hpp"

namespace gpsar::est {

// Body state in the ENU inertial frame I (origin at the RTK base station).
struct NavState {
  double t = 0.0;
  Vec3 position = Vec3::Zero();  // r_IB
  Vec3 velocity = Vec3::Zero();  // v_B in I
  Rot3 rotation;                 // R_IB

  Pose3 pose() const { return Pose3(rotation, position); }
};

// Sensor-model parameters estimated alongside the state: IMU biases and
// the two GNSS antenna lever arms in the body frame.
struct Calibration {
  Vec3 accel_bias = Vec3::Zero();
  Vec3 gyro_bias = Vec3::Zero();
  Vec3 lever_pos = Vec3::Zero();  // r_BP, position receiver antenna
  Vec3 lever_mb = Vec3::Zero();   // r_BM, moving baseline antenna
};

struct ImuMeasurement {
  double t = 0.0;
  Vec3 accel = Vec3::Zero();  // specific force in B, m/s^2
  Vec3 gyro = Vec3::Zero();   // rad/s in B
};

enum class FixMode { kRtk, kSbas };

struct GnssPosition {
  double t = 0.0;
  Vec3 position = Vec3::Zero();  // measured r_IP
  Mat3 cov = Mat3::Identity();
  FixMode fix = FixMode::kRtk;
};

struct MovingBaseline {
  double t = 0.0;
  Vec3 baseline = Vec3::Zero();  // measured r_PM in I (ENU tangent plane)
  Mat3 cov = Mat3::Identity();
};

// White noise densities (per sqrt(Hz)), bias random walks (per sqrt(s)),
// and prior sigmas. All weighting in the graph derives from here.
struct NoiseConfig {
  double sigma_a = 0.023;   // accelerometer noise density
  double sigma_g = 3.1e-4;  // gyroscope noise density
  double sigma_ba = 1e-4;   // accel bias random walk
  double sigma_bg = 2e-5;   // gyro bias random walk
  double prior_pos_std = 0.02;
  double prior_vel_std = 0.05;
  double prior_rot_std = 0.02;      // roll/pitch, rad
  double prior_yaw_std = 0.03;      // rad
  double prior_ba_std = 0.05;
  double prior_bg_std = 0.002;
  double prior_lever_std = 0.05;    // m
  double gravity = kGravity;

  Vec3 gravity_vec() const { return Vec3(0.0, 0.0, -gravity); }
};

}  // namespace gpsar::est
