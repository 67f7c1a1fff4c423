#pragma once

#include <random>

#include "gpsar/control/tracker.hpp"

namespace gpsar::ctrl {

struct VehicleState {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  double yaw = 0.0;
  double yaw_rate = 0.0;
};

struct PlantParams {
  double velocity_tau = 0.3;   // first-order velocity tracking constant, s
  double yaw_rate_tau = 0.15;
  double velocity_noise_std = 0.0;  // m/s per step, 0 disables noise
};

// First-order velocity-tracking plant. The autopilot inner loops are out
// of scope; this only needs to close a stable loop around track().
VehicleState vehicle_step(const VehicleState& state, const Command& cmd,
                          double dt, const PlantParams& params,
                          std::mt19937_64* rng = nullptr);

// Acceleration realized by the plant in the last step, for feeding the
// controller's damping term.
Vec3 plant_acceleration(const VehicleState& state, const Command& cmd,
                        const PlantParams& params);

struct ClosedLoopSample {
  double t = 0.0;
  Vec3 ref_position = Vec3::Zero();
  Vec3 position = Vec3::Zero();
  Vec3 command = Vec3::Zero();
};

// Runs the tracking loop along a trajectory at the given rate and returns
// the log; used by the simulation CLI and the regression tests.
std::vector<ClosedLoopSample> simulate_tracking(
    const traj::Trajectory& trajectory, const Gains& gains,
    const CommandLimits& limits, const PlantParams& plant, double rate_hz,
    uint64_t seed = 0);

}  // namespace gpsar::ctrl
