#include "gpsar/sim/truth.hpp"

#include <cmath>
#include <random>

namespace gpsar::sim {

namespace {

// C2 ramp weight: 0 before t0, smoothstep over [t0, t0+tr], 1 after.
struct Ramp {
  double t0, tr;

  double value(double t) const {
    if (t <= t0) return 0.0;
    if (t >= t0 + tr) return 1.0;
    const double u = (t - t0) / tr;
    return u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
  }
  double slope(double t) const {
    if (t <= t0 || t >= t0 + tr) return 0.0;
    const double u = (t - t0) / tr;
    return 30.0 * u * u * (1.0 + u * (-2.0 + u)) / tr;
  }
  double curvature(double t) const {
    if (t <= t0 || t >= t0 + tr) return 0.0;
    const double u = (t - t0) / tr;
    return (60.0 * u - 180.0 * u * u + 120.0 * u * u * u) / (tr * tr);
  }
  // Integral of value from 0 to t (progress of the warped clock).
  double integral(double t) const {
    if (t <= t0) return 0.0;
    if (t >= t0 + tr) {
      return 0.5 * tr + (t - t0 - tr);
    }
    const double u = (t - t0) / tr;
    const double p = u * u * u * u * (2.5 + u * (-3.0 + u));
    return tr * p;
  }
};

// Integrates the sampled body rates with the shared midpoint rule.
void integrate_rotations(GroundTruth* truth, const Rot3& r0) {
  const size_t n = truth->t.size();
  truth->rotation.resize(n);
  truth->rotation[0] = r0;
  for (size_t k = 0; k + 1 < n; ++k) {
    const double dt = truth->t[k + 1] - truth->t[k];
    const Vec3 w_mid =
        0.5 * (truth->angular_velocity[k] + truth->angular_velocity[k + 1]);
    truth->rotation[k + 1] = truth->rotation[k] * Rot3::exp(w_mid * dt);
  }
}

}  // namespace

size_t GroundTruth::index_at(double time) const {
  if (t.empty()) throw ConfigError("empty ground truth");
  const double dt = t.size() > 1 ? t[1] - t[0] : 1.0;
  const long k = std::lround((time - t.front()) / dt);
  return static_cast<size_t>(std::clamp<long>(k, 0,
                                              static_cast<long>(t.size()) - 1));
}

Pose3 GroundTruth::pose_at(double time) const {
  if (time <= t.front()) return pose(0);
  if (time >= t.back()) return pose(t.size() - 1);
  const double dt = t[1] - t[0];
  const size_t k = static_cast<size_t>((time - t.front()) / dt);
  const size_t k1 = std::min(k + 1, t.size() - 1);
  const double alpha = (time - t[k]) / std::max(t[k1] - t[k], 1e-12);
  return pose(k).interpolate(pose(k1), alpha);
}

GroundTruth analytic_circle_truth(const CircleTruthConfig& cfg) {
  if (!(cfg.radius > 0.0) || !(cfg.speed > 0.0)) {
    throw ConfigError("circle truth needs positive radius and speed");
  }
  const Ramp ramp{cfg.standstill, std::max(cfg.ramp, 1e-6)};
  const double omega = cfg.speed / cfg.radius;
  const double dt = 1.0 / cfg.rate;
  const size_t n = static_cast<size_t>(std::llround(cfg.duration * cfg.rate)) + 1;

  GroundTruth truth;
  truth.t.resize(n);
  truth.position.resize(n);
  truth.velocity.resize(n);
  truth.acceleration.resize(n);
  truth.angular_velocity.resize(n);

  const double wobble_amp = cfg.wobble_deg * M_PI / 180.0;
  const double w_freq = 2.0 * M_PI * cfg.wobble_hz;
  const double alt_freq = 2.0 * M_PI / std::max(cfg.alt_period, 1e-6);

  for (size_t k = 0; k < n; ++k) {
    const double t = k * dt;
    truth.t[k] = t;

    const double theta = cfg.start_angle + omega * ramp.integral(t);
    const double theta_dot = omega * ramp.value(t);
    const double theta_ddot = omega * ramp.slope(t);
    const double c = std::cos(theta), s = std::sin(theta);

    // Altitude modulation faded in with the same ramp.
    const double w = ramp.value(t), wd = ramp.slope(t), wdd = ramp.curvature(t);
    const double ph = alt_freq * (t - cfg.standstill);
    const double osc = cfg.alt_amplitude * std::sin(ph);
    const double osc_d = cfg.alt_amplitude * alt_freq * std::cos(ph);
    const double osc_dd = -cfg.alt_amplitude * alt_freq * alt_freq *
                          std::sin(ph);

    truth.position[k] = cfg.center + Vec3(cfg.radius * c, cfg.radius * s,
                                          w * osc);
    truth.velocity[k] =
        Vec3(-cfg.radius * s * theta_dot, cfg.radius * c * theta_dot,
             wd * osc + w * osc_d);
    truth.acceleration[k] =
        Vec3(-cfg.radius * (c * theta_dot * theta_dot + s * theta_ddot),
             cfg.radius * (-s * theta_dot * theta_dot + c * theta_ddot),
             wdd * osc + 2.0 * wd * osc_d + w * osc_dd);

    Vec3 body_rate(0.0, 0.0, theta_dot);
    if (wobble_amp > 0.0) {
      const double tw = t - cfg.standstill;
      body_rate.x() += w * wobble_amp * std::sin(w_freq * tw);
      body_rate.y() += w * wobble_amp * std::sin(1.37 * w_freq * tw + 0.7);
    }
    truth.angular_velocity[k] = body_rate;
  }

  // Tangent heading at the entry point.
  const Rot3 r0 = Rot3::rot_z(cfg.start_angle + M_PI / 2.0);
  integrate_rotations(&truth, r0);
  return truth;
}

GroundTruth swing_truth(const SwingTruthConfig& cfg) {
  if (!(cfg.duration > 0.0)) {
    throw ConfigError("swing truth needs positive duration");
  }
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> freq(0.22, 0.55);   // Hz, rope-like
  std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
  std::uniform_real_distribution<double> scale(0.6, 1.0);

  struct Tone {
    double amp, omega, phi;
  };
  // Translation tones per axis, amplitudes set from the acceleration target.
  std::array<std::vector<Tone>, 3> pos_tones;
  for (int axis = 0; axis < 3; ++axis) {
    const double axis_gain = axis == 2 ? 0.35 : 1.0;  // less vertical motion
    for (int i = 0; i < 3; ++i) {
      const double f = freq(rng);
      const double w = 2.0 * M_PI * f;
      const double a_target = cfg.accel_peak * axis_gain * scale(rng) / 2.0;
      pos_tones[axis].push_back({a_target / (w * w), w, phase(rng)});
    }
  }
  // Body-rate tones, amplitudes set from the attitude excursion target.
  std::array<std::vector<Tone>, 3> rate_tones;
  const double att_peak = cfg.attitude_peak_deg * M_PI / 180.0;
  for (int axis = 0; axis < 3; ++axis) {
    const double axis_gain = axis == 2 ? 0.5 : 1.0;
    for (int i = 0; i < 2; ++i) {
      const double f = freq(rng);
      const double w = 2.0 * M_PI * f;
      const double angle_target = att_peak * axis_gain * scale(rng) / 1.4;
      rate_tones[axis].push_back({angle_target * w, w, phase(rng)});
    }
  }

  const Ramp ramp{cfg.standstill, std::max(cfg.ramp, 1e-6)};
  const double dt = 1.0 / cfg.rate;
  const size_t n = static_cast<size_t>(std::llround(cfg.duration * cfg.rate)) + 1;

  GroundTruth truth;
  truth.t.resize(n);
  truth.position.resize(n);
  truth.velocity.resize(n);
  truth.acceleration.resize(n);
  truth.angular_velocity.resize(n);

  for (size_t k = 0; k < n; ++k) {
    const double t = k * dt;
    truth.t[k] = t;
    const double w = ramp.value(t), wd = ramp.slope(t), wdd = ramp.curvature(t);
    const double ts = t - cfg.standstill;

    Vec3 p = Vec3::Zero(), v = Vec3::Zero(), a = Vec3::Zero();
    for (int axis = 0; axis < 3; ++axis) {
      double osc = 0.0, osc_d = 0.0, osc_dd = 0.0;
      for (const Tone& tone : pos_tones[axis]) {
        const double arg = tone.omega * ts + tone.phi;
        osc += tone.amp * std::sin(arg);
        osc_d += tone.amp * tone.omega * std::cos(arg);
        osc_dd += -tone.amp * tone.omega * tone.omega * std::sin(arg);
      }
      p[axis] = w * osc;
      v[axis] = wd * osc + w * osc_d;
      a[axis] = wdd * osc + 2.0 * wd * osc_d + w * osc_dd;
    }
    truth.position[k] = cfg.anchor + p;
    truth.velocity[k] = v;
    truth.acceleration[k] = a;

    Vec3 rate = Vec3::Zero();
    for (int axis = 0; axis < 3; ++axis) {
      for (const Tone& tone : rate_tones[axis]) {
        rate[axis] += tone.amp * std::sin(tone.omega * ts + tone.phi);
      }
    }
    truth.angular_velocity[k] = w * rate;
  }

  integrate_rotations(&truth, Rot3());
  return truth;
}

GroundTruth planned_truth(const traj::Trajectory& trajectory, double rate) {
  const double dt = 1.0 / rate;
  const double span = trajectory.duration();
  const size_t n = static_cast<size_t>(std::floor(span * rate)) + 1;

  GroundTruth truth;
  truth.t.resize(n);
  truth.position.resize(n);
  truth.velocity.resize(n);
  truth.acceleration.resize(n);
  truth.angular_velocity.resize(n);

  for (size_t k = 0; k < n; ++k) {
    const double t = trajectory.start_time + std::min(k * dt, span);
    const traj::FlatState s = trajectory.sample(t);
    truth.t[k] = t;
    truth.position[k] = s.position;
    truth.velocity[k] = s.velocity;
    truth.acceleration[k] = s.acceleration;
    truth.angular_velocity[k] = Vec3(0.0, 0.0, s.yaw_rate);
  }
  const Rot3 r0 = Rot3::rot_z(trajectory.sample(trajectory.start_time).yaw);
  integrate_rotations(&truth, r0);
  return truth;
}

}  // namespace gpsar::sim
