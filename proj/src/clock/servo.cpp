#include "gpsar/clock/servo.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace gpsar::clk {

ClockState ekf_step(const ClockState& state, double u_prev, double z,
                    const Vec3& process_noise_std,
                    double measurement_noise_std, double dt) {
  ClockState next = state;

  // Predict: tau integrates (u - V0) * c; V0 and c are constants.
  next.tau = state.tau + dt * (u_prev - state.v0) * state.c;
  Mat3 f = Mat3::Identity();
  f(0, 1) = -dt * state.c;
  f(0, 2) = dt * (u_prev - state.v0);
  Mat3 q = Mat3::Zero();
  for (int i = 0; i < 3; ++i) {
    q(i, i) = process_noise_std[i] * process_noise_std[i] * dt;
  }
  next.cov = f * state.cov * f.transpose() + q;

  // Scalar measurement update on tau, Joseph form. A tiny floor keeps the
  // zero-noise configurations well conditioned.
  const double r =
      std::max(measurement_noise_std * measurement_noise_std, 1e-24);
  const Vec3 h(1.0, 0.0, 0.0);
  const double s = next.cov(0, 0) + r;
  const Vec3 k = next.cov.col(0) / s;
  const double innovation = z - next.tau;
  next.tau += k[0] * innovation;
  next.v0 += k[1] * innovation;
  next.c += k[2] * innovation;
  const Mat3 ikh = Mat3::Identity() - k * h.transpose();
  next.cov = ikh * next.cov * ikh.transpose() + r * k * k.transpose();
  next.cov = 0.5 * (next.cov + next.cov.transpose());
  return next;
}

double lqr_gain(double c, double dt, double q_lqr, double r_lqr) {
  if (c == 0.0) {
    throw NumericalError("lqr_gain: zero voltage-to-drift gain");
  }
  const double b = dt * c;
  // Scalar DARE with A = 1: P = q/2 + sqrt(q^2/4 + q r / b^2).
  const double p = 0.5 * q_lqr +
                   std::sqrt(0.25 * q_lqr * q_lqr + q_lqr * r_lqr / (b * b));
  return b * p / (r_lqr + b * b * p);
}

double control(const ClockState& state, double gain, const DacParams& dac) {
  double v = state.v0 - gain * state.tau;
  v = std::clamp(v, dac.v_min, dac.v_max);
  const double levels = static_cast<double>((1u << dac.bits) - 1u);
  const double step = (dac.v_max - dac.v_min) / levels;
  return dac.v_min + std::round((v - dac.v_min) / step) * step;
}

std::vector<ServoSample> simulate_servo(const OscillatorTruth& truth,
                                        double tau0, int steps, uint64_t seed,
                                        const ServoConfig& config) {
  if (steps < 1) throw ConfigError("simulate_servo needs steps >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const double dt = truth.period;
  double tau_true = tau0;
  double v0_true = truth.v0;
  double c_true = truth.c;

  ClockState est;
  est.tau = tau0;
  est.v0 = config.use_truth_params ? truth.v0 : config.initial_v0;
  est.c = config.use_truth_params ? truth.c : config.initial_c;
  est.cov = config.initial_std.cwiseProduct(config.initial_std).asDiagonal();

  double u = est.v0;  // unsteered until the first measurement arrives
  std::vector<ServoSample> series;
  series.reserve(steps);
  for (int i = 0; i < steps; ++i) {
    // Truth propagation over one control period.
    tau_true += dt * (u - v0_true) * c_true +
                truth.process_noise[0] * std::sqrt(dt) * gauss(rng);
    v0_true += truth.process_noise[1] * std::sqrt(dt) * gauss(rng);
    c_true += truth.process_noise[2] * std::sqrt(dt) * gauss(rng);

    const double z = tau_true + truth.measurement_noise * gauss(rng);
    est = ekf_step(est, u, z, truth.process_noise, truth.measurement_noise,
                   dt);
    if (config.use_truth_params) {
      est.v0 = truth.v0;
      est.c = truth.c;
    }

    const double gain = lqr_gain(est.c, dt, config.q_lqr, config.r_lqr);
    u = control(est, gain, truth.dac);
    series.push_back({(i + 1) * dt, tau_true, est.tau, u});
  }
  return series;
}

double max_imu_delay(double innovation, double jerk_max, double gnss_period) {
  const double denom = 0.5 * jerk_max * gnss_period * gnss_period;
  if (denom <= 0.0) return std::numeric_limits<double>::infinity();
  return innovation / denom;
}

}  // namespace gpsar::clk
