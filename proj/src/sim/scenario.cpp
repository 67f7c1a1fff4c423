#include "gpsar/sim/scenario.hpp"

namespace gpsar::sim {

ScenarioOutput run_scenario(const ScenarioConfig& config,
                            const traj::Trajectory* planned) {
  ScenarioOutput out;
  if (config.source == "circle") {
    out.truth = analytic_circle_truth(config.circle);
  } else if (config.source == "swing") {
    SwingTruthConfig swing = config.swing;
    swing.seed = config.seed;
    out.truth = swing_truth(swing);
  } else if (config.source == "planned") {
    if (planned == nullptr) {
      throw ConfigError("scenario source 'planned' needs a trajectory");
    }
    out.truth = planned_truth(*planned, config.imu_rate);
    out.mask = traj::mission_mask(*planned);
  } else {
    throw ConfigError("unknown scenario source: " + config.source);
  }

  out.streams.imu =
      emit_imu(out.truth, config.true_accel_bias, config.true_gyro_bias,
               config.imu_sigma_a, config.imu_sigma_g, config.seed * 7 + 1);
  const GnssEmission gnss = emit_gnss(out.truth, config.lever_pos,
                                      config.lever_mb, config.gnss,
                                      config.seed * 7 + 2);
  out.streams.gnss_pos = gnss.positions;
  out.streams.gnss_mb = gnss.baselines;

  if (!config.targets.empty()) {
    out.pulses = emit_radar(out.truth, config.targets, config.radar,
                            config.seed * 7 + 3);
  }
  out.dji_attitude = emit_attitude(out.truth, config.attitude_rate,
                                   config.attitude_noise, config.seed * 7 + 4);
  return out;
}

}  // namespace gpsar::sim
