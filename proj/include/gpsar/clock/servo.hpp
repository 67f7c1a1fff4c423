#pragma once

#include <cstdint>
#include <vector>

#include "gpsar/core/types.hpp"

namespace gpsar::clk {

// Disciplined-oscillator state: offset to GNSS time, the nominal voltage
// that yields exactly 10 MHz, and the voltage-to-drift gain.
struct ClockState {
  double tau = 0.0;      // s
  double v0 = 1.65;      // volts
  double c = 1e-6;       // (s/s) per volt
  Mat3 cov = Mat3::Identity();
};

struct DacParams {
  double v_min = 0.0;
  double v_max = 3.3;
  int bits = 12;
};

// True hardware values; they differ from the nominal EKF initialization
// (1.65 V, 1e-6), which is what the online estimation has to make up.
struct OscillatorTruth {
  double v0 = 1.703;
  double c = 1.12e-6;
  Vec3 process_noise = Vec3(1e-9, 1e-5, 0.0);  // std dev per sqrt(s)
  double measurement_noise = 50e-9;            // std dev, s
  DacParams dac;
  double period = 1.0;  // control period, s
};

// One EKF cycle: nonlinear predict with the previously applied voltage,
// then a scalar update on the measured offset. Covariance stays SPD
// (Joseph-form update).
ClockState ekf_step(const ClockState& state, double u_prev, double z,
                    const Vec3& process_noise_std, double measurement_noise_std,
                    double dt);

// Discrete scalar LQR on the offset channel: tau' = tau + dt*c*u with
// deviation input u = V_DAC - V0. Throws NumericalError for c == 0.
double lqr_gain(double c, double dt, double q_lqr, double r_lqr);

// V_DAC = -K_c * tau + V0, quantized to the DAC lattice and clamped.
double control(const ClockState& state, double gain, const DacParams& dac);

struct ServoSample {
  double t = 0.0;
  double tau_true = 0.0;
  double tau_est = 0.0;
  double v_dac = 0.0;
};

struct ServoConfig {
  double q_lqr = 1.0;
  double r_lqr = 1e-11;  // closed-loop pole ~0.7 at c ~ 1e-6, dt 1 s
  Vec3 initial_std = Vec3(1e-5, 0.2, 5e-7);
  double initial_v0 = 1.65;
  double initial_c = 1e-6;
  bool use_truth_params = false;  // oracle mode: skip estimation of V0, c
};

// Simulates the PPS-driven discipline loop: truth propagates with process
// noise, one EKF + LQR step per simulated second. Deterministic per seed.
std::vector<ServoSample> simulate_servo(const OscillatorTruth& truth,
                                        double tau0, int steps, uint64_t seed,
                                        const ServoConfig& config = {});

// Admissible IMU timing delay bound: innovation over the double time
// integral of jerk across one GNSS period. Callers apply the 10x
// "significantly smaller" margin. Returns +inf as jerk goes to zero.
double max_imu_delay(double innovation, double jerk_max, double gnss_period);

}  // namespace gpsar::clk
