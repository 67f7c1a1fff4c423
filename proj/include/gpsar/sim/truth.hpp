#pragma once

#include <cstdint>

#include "gpsar/core/pose3.hpp"
#include "gpsar/trajectory/polynomial.hpp"

namespace gpsar::sim {

// Dense state series at IMU rate. Rotations are produced by the same
// midpoint integrator the estimator uses, driven by the analytic body
// rates, so a zero-noise round trip closes exactly.
struct GroundTruth {
  std::vector<double> t;
  std::vector<Rot3> rotation;
  std::vector<Vec3> position;
  std::vector<Vec3> velocity;
  std::vector<Vec3> acceleration;
  std::vector<Vec3> angular_velocity;  // body frame

  size_t size() const { return t.size(); }
  Pose3 pose(size_t k) const { return Pose3(rotation[k], position[k]); }

  // Nearest-sample index for a query time on the uniform grid.
  size_t index_at(double time) const;
  Pose3 pose_at(double time) const;  // slerp/lerp between samples
};

// Constant-velocity circle with a standstill phase and a smooth spin-up.
// Optional altitude sinusoid and body-rate wobble provide the attitude
// excitation needed by the self-calibration studies.
struct CircleTruthConfig {
  Vec3 center = Vec3(0.0, 0.0, 3.0);  // z is the base flight altitude
  double radius = 7.5;
  double speed = 1.0;
  double start_angle = 0.0;
  double standstill = 2.0;  // s at rest before the ramp
  double ramp = 4.0;        // s to reach cruise speed
  double duration = 60.0;   // total, s
  double rate = 1000.0;     // Hz
  double alt_amplitude = 0.0;
  double alt_period = 10.0;
  double wobble_deg = 0.0;  // roll/pitch rate oscillation amplitude
  double wobble_hz = 0.25;
};

GroundTruth analytic_circle_truth(const CircleTruthConfig& config);

// Randomized rope-swing motion: band-limited sum-of-sinusoid translation
// around the hanging point and band-limited body rates, both faded in
// after a standstill phase. Deterministic per seed.
struct SwingTruthConfig {
  Vec3 anchor = Vec3(0.0, 0.0, 2.0);  // pivot-below point
  double duration = 90.0;
  double standstill = 2.0;
  double ramp = 3.0;
  double rate = 1000.0;
  double accel_peak = 2.5;       // m/s^2 target for the strongest axis
  double attitude_peak_deg = 25.0;
  uint64_t seed = 1;
};

GroundTruth swing_truth(const SwingTruthConfig& config);

// Follows a planned polynomial trajectory; attitude is yaw-only from the
// heading polynomial (level flight).
GroundTruth planned_truth(const traj::Trajectory& trajectory, double rate);

}  // namespace gpsar::sim
