#pragma once

#include "gpsar/estimator/smoother.hpp"
#include "gpsar/sar/sar.hpp"
#include "gpsar/sim/truth.hpp"

namespace gpsar::sim {

// Inverts the IMU measurement model per sample and adds seeded white
// noise; zero-noise mode is exact. Noise densities scale as sigma/sqrt(dt).
std::vector<est::ImuMeasurement> emit_imu(const GroundTruth& truth,
                                          const Vec3& accel_bias,
                                          const Vec3& gyro_bias,
                                          double sigma_a, double sigma_g,
                                          uint64_t seed);

struct GnssEmission {
  std::vector<est::GnssPosition> positions;
  std::vector<est::MovingBaseline> baselines;
};

struct GnssEmitConfig {
  double pos_rate = 10.0;  // Hz
  double mb_rate = 5.0;
  double start_time = 1.0;     // first measurement, s into the truth
  double pos_noise_std = 0.005;
  double mb_noise_std = 0.005;
};

// r_IP = r_IB + R r_BP at pos_rate, r_PM = R (r_BM - r_BP) at mb_rate.
GnssEmission emit_gnss(const GroundTruth& truth, const Vec3& lever_pos,
                       const Vec3& lever_mb, const GnssEmitConfig& config,
                       uint64_t seed);

struct Target {
  Vec3 position = Vec3::Zero();
  double reflectivity = 1.0;
};

struct RadarEmitConfig {
  sar::PulseHeader header;
  sar::SarConfig sar;          // permittivity and surface shared with imaging
  Pose3 tx_extrinsic;          // T_BS of the transmitting antenna
  Pose3 rx_extrinsic;          // equal to tx for the monostatic setup
  double rate = 200.0;         // Hz
  double bandwidth = 3e9;      // Hz, sets the sinc main lobe c/(2B)
  double noise_std = 0.0;      // complex noise per bin
  double saturation = 0.0;     // 0 disables the saturated flag
};

// Band-limited point responses at the true optical path delay, phase from
// the same model used in imaging.
sar::PulseSet emit_radar(const GroundTruth& truth,
                         const std::vector<Target>& targets,
                         const RadarEmitConfig& config, uint64_t seed);

// Autopilot attitude stream for the DJI+RTK ablation chain: truth rotation
// with a small seeded right-perturbation.
std::vector<std::pair<double, Rot3>> emit_attitude(const GroundTruth& truth,
                                                   double rate,
                                                   double noise_rad,
                                                   uint64_t seed);

}  // namespace gpsar::sim
