#include "gpsar/sim/sensors.hpp"

#include <cmath>
#include <random>

namespace gpsar::sim {

namespace {

double sinc(double x) {
  if (std::abs(x) < 1e-9) return 1.0;
  const double px = M_PI * x;
  return std::sin(px) / px;
}

}  // namespace

std::vector<est::ImuMeasurement> emit_imu(const GroundTruth& truth,
                                          const Vec3& accel_bias,
                                          const Vec3& gyro_bias,
                                          double sigma_a, double sigma_g,
                                          uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const Vec3 g = gravity_vector();
  const double dt = truth.size() > 1 ? truth.t[1] - truth.t[0] : 1e-3;
  const double na = sigma_a / std::sqrt(dt);
  const double ng = sigma_g / std::sqrt(dt);

  std::vector<est::ImuMeasurement> out(truth.size());
  for (size_t k = 0; k < truth.size(); ++k) {
    est::ImuMeasurement& m = out[k];
    m.t = truth.t[k];
    m.accel = truth.rotation[k].unrotate(truth.acceleration[k] - g) +
              accel_bias;
    m.gyro = truth.angular_velocity[k] + gyro_bias;
    if (sigma_a > 0.0) {
      m.accel += na * Vec3(gauss(rng), gauss(rng), gauss(rng));
    }
    if (sigma_g > 0.0) {
      m.gyro += ng * Vec3(gauss(rng), gauss(rng), gauss(rng));
    }
  }
  return out;
}

GnssEmission emit_gnss(const GroundTruth& truth, const Vec3& lever_pos,
                       const Vec3& lever_mb, const GnssEmitConfig& config,
                       uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double rate = truth.size() > 1
                          ? 1.0 / (truth.t[1] - truth.t[0])
                          : 1000.0;
  const int pos_stride = static_cast<int>(std::lround(rate / config.pos_rate));
  const int mb_stride = static_cast<int>(std::lround(rate / config.mb_rate));
  const size_t start = truth.index_at(config.start_time);

  GnssEmission out;
  for (size_t k = start; k < truth.size(); k += pos_stride) {
    est::GnssPosition z;
    z.t = truth.t[k];
    z.position = truth.position[k] + truth.rotation[k] * lever_pos;
    if (config.pos_noise_std > 0.0) {
      z.position += config.pos_noise_std *
                    Vec3(gauss(rng), gauss(rng), gauss(rng));
    }
    z.cov = config.pos_noise_std > 0.0
                ? Mat3(config.pos_noise_std * config.pos_noise_std *
                       Mat3::Identity())
                : Mat3(1e-6 * Mat3::Identity());
    z.fix = est::FixMode::kRtk;
    out.positions.push_back(z);
  }
  for (size_t k = start; k < truth.size(); k += mb_stride) {
    est::MovingBaseline z;
    z.t = truth.t[k];
    z.baseline = truth.rotation[k] * (lever_mb - lever_pos);
    if (config.mb_noise_std > 0.0) {
      z.baseline += config.mb_noise_std *
                    Vec3(gauss(rng), gauss(rng), gauss(rng));
    }
    z.cov = config.mb_noise_std > 0.0
                ? Mat3(config.mb_noise_std * config.mb_noise_std *
                       Mat3::Identity())
                : Mat3(1e-6 * Mat3::Identity());
    out.baselines.push_back(z);
  }
  return out;
}

sar::PulseSet emit_radar(const GroundTruth& truth,
                         const std::vector<Target>& targets,
                         const RadarEmitConfig& config, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  sar::PulseSet set;
  set.header = config.header;
  set.header.f_c = config.sar.f_c;
  const double resolution = config.sar.c / (2.0 * config.bandwidth);
  const double rate = truth.size() > 1
                          ? 1.0 / (truth.t[1] - truth.t[0])
                          : 1000.0;
  const int stride = static_cast<int>(std::lround(rate / config.rate));
  const double k_phase = 2.0 * M_PI * config.sar.f_c / config.sar.c;

  for (size_t k = 0; k < truth.size(); k += stride) {
    sar::RadarPulse pulse;
    pulse.t = truth.t[k];
    pulse.samples.assign(set.header.num_bins, {0.0f, 0.0f});

    const Pose3 body = truth.pose(k);
    const Pose3 tx = body * config.tx_extrinsic;
    const Pose3 rx = body * config.rx_extrinsic;
    for (const Target& target : targets) {
      const double path = sar::optical_path(tx.translation(), target.position,
                                            config.sar) +
                          sar::optical_path(rx.translation(), target.position,
                                            config.sar);
      const double center = 0.5 * path;  // one-way range coordinate
      const double phase = k_phase * path;
      const std::complex<double> rot(std::cos(phase), std::sin(phase));
      for (int b = 0; b < set.header.num_bins; ++b) {
        const double r_bin = set.header.start_range + b * set.header.bin_spacing;
        const double env = target.reflectivity *
                           sinc((r_bin - center) / resolution);
        pulse.samples[b] += std::complex<float>(
            static_cast<float>(env * rot.real()),
            static_cast<float>(env * rot.imag()));
      }
    }
    if (config.noise_std > 0.0) {
      for (auto& s : pulse.samples) {
        s += std::complex<float>(
            static_cast<float>(config.noise_std * gauss(rng)),
            static_cast<float>(config.noise_std * gauss(rng)));
      }
    }
    if (config.saturation > 0.0) {
      for (const auto& s : pulse.samples) {
        if (std::abs(s) > config.saturation) {
          pulse.saturated = true;
          break;
        }
      }
    }
    set.pulses.push_back(std::move(pulse));
  }
  return set;
}

std::vector<std::pair<double, Rot3>> emit_attitude(const GroundTruth& truth,
                                                   double rate,
                                                   double noise_rad,
                                                   uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double truth_rate = truth.size() > 1
                                ? 1.0 / (truth.t[1] - truth.t[0])
                                : 1000.0;
  const int stride = static_cast<int>(std::lround(truth_rate / rate));

  std::vector<std::pair<double, Rot3>> out;
  for (size_t k = 0; k < truth.size(); k += stride) {
    Rot3 r = truth.rotation[k];
    if (noise_rad > 0.0) {
      r = r * Rot3::exp(noise_rad *
                        Vec3(gauss(rng), gauss(rng), gauss(rng)));
    }
    out.emplace_back(truth.t[k], r);
  }
  return out;
}

}  // namespace gpsar::sim
