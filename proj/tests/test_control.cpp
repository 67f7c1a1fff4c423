#include <doctest.h>

#include "gpsar/control/altitude_filter.hpp"
#include "gpsar/control/vehicle_sim.hpp"
#include "gpsar/trajectory/planner.hpp"

using namespace gpsar;
using namespace gpsar::ctrl;

TEST_CASE("track proportional term and limits") {
  Gains gains;
  gains.kp = Vec3::Ones();
  gains.kv = Vec3::Zero();
  gains.ka = Vec3::Zero();
  gains.kpsi = 1.0;
  gains.kpsi_dot = 0.0;
  CommandLimits limits;
  limits.max_horizontal_speed = 3.0;
  limits.max_vertical_speed = 2.0;
  limits.max_yaw_rate = 1.0;

  traj::FlatState ref;
  VehicleEstimate est;

  SUBCASE("unit position error maps to unit velocity") {
    ref.position = Vec3(1, 0, 0);
    const Command cmd = track(ref, est, gains, limits);
    CHECK((cmd.velocity - Vec3(1, 0, 0)).norm() < 1e-12);
  }

  SUBCASE("horizontal clamp preserves direction") {
    ref.position = Vec3(3, 4, 0);  // requests 5 m/s at 36.87 deg
    const Command cmd = track(ref, est, gains, limits);
    CHECK(cmd.velocity.head<2>().norm() == doctest::Approx(3.0));
    const Vec3 dir = Vec3(3, 4, 0).normalized();
    CHECK((cmd.velocity.head<2>().normalized() -
           dir.head<2>()).norm() < 1e-12);
  }

  SUBCASE("heading error wraps to (-pi, pi]") {
    ref.yaw = 2.0 * M_PI - 0.1;
    est.yaw = 0.0;
    const Command cmd = track(ref, est, gains, limits);
    CHECK(cmd.yaw_rate == doctest::Approx(-0.1).epsilon(1e-12));
  }

  SUBCASE("zero error gives zero command") {
    gains.kv = Vec3::Ones();
    gains.ka = Vec3::Constant(0.1);
    gains.kpsi_dot = 0.2;
    const Command cmd = track(ref, est, gains, limits);
    CHECK(cmd.velocity.norm() == 0.0);
    CHECK(cmd.yaw_rate == 0.0);
  }
}

TEST_CASE("vehicle_step plant behavior") {
  PlantParams plant;
  VehicleState state;

  SUBCASE("zero command from rest keeps the state") {
    const VehicleState next = vehicle_step(state, Command{}, 0.02, plant);
    CHECK(next.position.norm() == 0.0);
    CHECK(next.velocity.norm() == 0.0);
  }

  SUBCASE("ideal tracking limit advances v*dt per step") {
    plant.velocity_tau = 1e-9;
    Command cmd;
    cmd.velocity = Vec3(1.0, 0.0, 0.0);
    VehicleState s;
    s.velocity = cmd.velocity;  // already tracking
    const VehicleState next = vehicle_step(s, cmd, 0.02, plant);
    CHECK(next.position.x() == doctest::Approx(0.02).epsilon(1e-9));
  }

  CHECK_THROWS_AS(vehicle_step(state, Command{}, 0.5, plant), ConfigError);
}

TEST_CASE("closed loop tracks a circle within 0.2 m RMS") {
  traj::MissionConfig config;
  traj::CirclePlan plan;
  plan.center = Vec3(0, 0, 2);
  plan.radius = 7.5;
  plan.speed = 1.0;
  config.primitives.emplace_back(plan);
  const traj::Mission mission = traj::plan_mission(config);

  Gains gains;  // defaults
  CommandLimits limits;
  PlantParams plant;
  const auto log = simulate_tracking(mission.trajectory, gains, limits,
                                     plant, 50.0);
  double sum = 0.0;
  for (const auto& s : log) {
    sum += (s.ref_position - s.position).squaredNorm();
  }
  const double rms = std::sqrt(sum / log.size());
  CHECK(rms < 0.2);
}

TEST_CASE("alt_predict accumulates deltas") {
  AltitudeFilterState state{10.0, 0.04};

  const auto same = alt_predict(state, 0.0, 0.01);
  CHECK(same.agl == 10.0);
  CHECK(same.variance == doctest::Approx(0.05));

  CHECK(alt_predict(state, 1.0, 0.01).agl == doctest::Approx(11.0));

  // Additivity: any split of the same total shift lands at the same place.
  AltitudeFilterState a = state;
  for (double dz : {0.2, -0.1, 0.4, 0.0}) a = alt_predict(a, dz, 0.001);
  CHECK(a.agl == doctest::Approx(10.5).epsilon(1e-12));
}

TEST_CASE("alt_update tilt correction, gates and variance behavior") {
  AltimeterParams params;
  params.base_std = 0.1;
  params.attitude_cutoff = 30.0 * M_PI / 180.0;
  params.mahalanobis_gate = 3.0;
  params.max_range = 50.0;

  SUBCASE("tilt-corrected measurement") {
    AltitudeFilterState state{4.9, 1e6};  // diffuse: update lands on z
    const auto out = alt_update(state, 5.0, 10.0 * M_PI / 180.0, 0.0, params);
    CHECK(out.accepted);
    CHECK(out.state.agl ==
          doctest::Approx(5.0 * std::cos(10.0 * M_PI / 180.0)).epsilon(1e-6));
  }

  SUBCASE("attitude cutoff rejects and leaves state bit-identical") {
    AltitudeFilterState state{10.0, 0.04};
    const auto out = alt_update(state, 9.0, 35.0 * M_PI / 180.0, 0.0, params);
    CHECK_FALSE(out.accepted);
    CHECK(out.state.agl == state.agl);
    CHECK(out.state.variance == state.variance);
  }

  SUBCASE("mahalanobis gate rejects a 3 m outlier") {
    // (10-7)/sqrt(0.1^2+0.2^2) ~ 13.4 > 3.
    AltitudeFilterState state{10.0, 0.01};
    AltimeterParams p = params;
    p.base_std = 0.2;
    p.attitude_scale = 0.0;
    p.range_scale = 0.0;
    const auto out = alt_update(state, 7.0, 0.0, 0.0, p);
    CHECK_FALSE(out.accepted);
    CHECK(out.state.agl == state.agl);
  }

  SUBCASE("accepted updates never increase variance") {
    AltitudeFilterState state{5.0, 0.09};
    const auto out = alt_update(state, 5.1, 0.05, -0.03, params);
    CHECK(out.accepted);
    CHECK(out.state.variance <= state.variance);
  }
}

TEST_CASE("altitude scenario: outlier robustness and drift correction") {
  // Mirrors the high/low altitude segments: a 3 m range outlier at 30 m
  // AGL barely moves the estimate; near the ground the altimeters pull the
  // estimate away from a drifted autopilot altitude.
  AltimeterParams radar;
  radar.base_std = 0.15;
  radar.max_range = 50.0;
  AltimeterParams lidar;
  lidar.base_std = 0.05;
  lidar.max_range = 12.0;

  std::mt19937_64 rng(9);
  std::normal_distribution<double> noise(0.0, 0.05);

  // Phase 1: hover at 30 m, inject one radar outlier.
  AltitudeFilterState state{30.0, 0.25};
  const double q = 1e-4;
  double worst_perturbation = 0.0;
  for (int k = 0; k < 200; ++k) {
    state = alt_predict(state, 0.0, q);
    const double range = (k == 100) ? 3.0 : 30.0 + noise(rng);
    const double before = state.agl;
    const auto out = alt_update(state, range, 0.0, 0.0, radar);
    state = out.state;
    if (k == 100) worst_perturbation = std::abs(state.agl - before);
  }
  CHECK(worst_perturbation < 0.1);
  CHECK(std::abs(state.agl - 30.0) < 0.2);

  // Phase 2: descend to 1 m true AGL while the autopilot altitude drifts
  // 0.5 m; the process model follows the drifted deltas but the ranges
  // correct near the ground.
  double true_agl = 30.0;
  double drift = 0.0;
  const double dt = 0.1;
  const int steps = 600;
  for (int k = 0; k < steps; ++k) {
    const double descent = (true_agl > 1.0) ? -0.1 * dt * 29.0 / 6.0 : 0.0;
    true_agl = std::max(1.0, true_agl + descent);
    drift += 0.5 / steps;
    state = alt_predict(state, descent + 0.5 / steps, q);
    const double radar_range = true_agl + noise(rng) * 0.4;
    state = alt_update(state, radar_range, 0.0, 0.0, radar).state;
    if (true_agl < 12.0) {
      const double lidar_range = true_agl + noise(rng) * 0.2;
      state = alt_update(state, lidar_range, 0.0, 0.0, lidar).state;
    }
  }
  CHECK(std::abs(state.agl - true_agl) < 0.05);
}
