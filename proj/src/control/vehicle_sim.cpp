#include "gpsar/control/vehicle_sim.hpp"

namespace gpsar::ctrl {

Vec3 plant_acceleration(const VehicleState& state, const Command& cmd,
                        const PlantParams& params) {
  return (cmd.velocity - state.velocity) / params.velocity_tau;
}

VehicleState vehicle_step(const VehicleState& state, const Command& cmd,
                          double dt, const PlantParams& params,
                          std::mt19937_64* rng) {
  if (!(dt > 0.0 && dt <= 0.1)) {
    throw ConfigError("vehicle_step expects dt in (0, 0.1]");
  }
  VehicleState next = state;
  const double alpha = 1.0 - std::exp(-dt / params.velocity_tau);
  next.velocity += alpha * (cmd.velocity - state.velocity);
  if (rng != nullptr && params.velocity_noise_std > 0.0) {
    std::normal_distribution<double> noise(0.0, params.velocity_noise_std);
    next.velocity += Vec3(noise(*rng), noise(*rng), noise(*rng));
  }
  next.position += 0.5 * (state.velocity + next.velocity) * dt;

  const double beta = 1.0 - std::exp(-dt / params.yaw_rate_tau);
  next.yaw_rate += beta * (cmd.yaw_rate - state.yaw_rate);
  next.yaw = wrap_angle(next.yaw + 0.5 * (state.yaw_rate + next.yaw_rate) * dt);
  return next;
}

std::vector<ClosedLoopSample> simulate_tracking(
    const traj::Trajectory& trajectory, const Gains& gains,
    const CommandLimits& limits, const PlantParams& plant, double rate_hz,
    uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double dt = 1.0 / rate_hz;

  const FlatState initial = trajectory.sample(trajectory.start_time);
  VehicleState state;
  state.position = initial.position;
  state.velocity = initial.velocity;
  state.yaw = initial.yaw;
  state.yaw_rate = initial.yaw_rate;

  std::vector<ClosedLoopSample> log;
  const int steps =
      static_cast<int>(std::floor(trajectory.duration() * rate_hz));
  log.reserve(steps + 1);
  Command cmd;
  for (int i = 0; i <= steps; ++i) {
    const double t = trajectory.start_time + i * dt;
    const FlatState ref = trajectory.sample(t);

    VehicleEstimate est;
    est.position = state.position;
    est.velocity = state.velocity;
    est.acceleration = plant_acceleration(state, cmd, plant);
    est.yaw = state.yaw;
    est.yaw_rate = state.yaw_rate;

    cmd = track(ref, est, gains, limits);
    log.push_back({t, ref.position, state.position, cmd.velocity});
    state = vehicle_step(state, cmd, dt,
                         plant, plant.velocity_noise_std > 0.0 ? &rng : nullptr);
  }
  return log;
}

}  // namespace gpsar::ctrl
