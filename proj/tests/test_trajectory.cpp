#include <doctest.h>

#include <random>

#include "gpsar/trajectory/planner.hpp"

using namespace gpsar;
using namespace gpsar::traj;

TEST_CASE("circle_vertex_count closed form") {
  // ceil(theta / arccos(2(1-d)^2 - 1))
  CHECK(circle_vertex_count(2.0 * M_PI, 0.05) == 10);
  CHECK(circle_vertex_count(M_PI / 2.0, 0.5) == 1);
  CHECK(circle_vertex_count(2.0 * M_PI, 0.005) == 32);
  CHECK_THROWS_AS(circle_vertex_count(2.0 * M_PI, 0.0), ConfigError);
  CHECK_THROWS_AS(circle_vertex_count(2.0 * M_PI, 1.0), ConfigError);
}

TEST_CASE("chord deviation bounded by d*r") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> rand_d(0.003, 0.3);
  std::uniform_real_distribution<double> rand_r(1.0, 30.0);
  std::uniform_real_distribution<double> rand_theta(0.3, 2.0 * M_PI);
  for (int trial = 0; trial < 100; ++trial) {
    const double d = rand_d(rng), r = rand_r(rng), theta = rand_theta(rng);
    const int m = circle_vertex_count(theta, d);
    const double alpha = theta / m;
    // Max radial deviation of a chord subtending alpha: r(1 - cos(alpha/2)).
    const double deviation = r * (1.0 - std::cos(0.5 * alpha));
    CHECK(deviation <= d * r + 1e-9);
  }
}

TEST_CASE("plan_circle geometry") {
  CirclePlan plan;
  plan.center = Vec3(0.0, 0.0, 2.0);
  plan.radius = 7.5;
  plan.speed = 1.0;
  plan.deviation = 0.05;
  const auto vertices = plan_circle(plan);
  CHECK(vertices.size() == 11);  // M = 10 for d = 0.05
  for (const auto& v : vertices) {
    const Vec3 radial = v.position - plan.center;
    CHECK(radial.norm() == doctest::Approx(7.5).epsilon(1e-9));
    // Tangency: velocity perpendicular to the radial direction.
    CHECK(std::abs(radial.dot(*v.velocity)) < 1e-9);
    CHECK(v.velocity->norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
  // Closed arc: first and last vertex coincide.
  CHECK((vertices.front().position - vertices.back().position).norm() < 1e-9);
}

TEST_CASE("plan_stripmap vertices") {
  const auto vertices = plan_stripmap(Vec3(0, 0, 2), Vec3(10, 0, 2), 1.0);
  CHECK(vertices.size() == 2);
  CHECK((*vertices[0].velocity - Vec3(1, 0, 0)).norm() < 1e-12);
  CHECK((*vertices[1].velocity - Vec3(1, 0, 0)).norm() < 1e-12);

  const auto fast = plan_stripmap(Vec3(0, 0, 2), Vec3(10, 0, 2), 2.0);
  CHECK((*fast[0].velocity - Vec3(2, 0, 0)).norm() < 1e-12);

  const auto diag = plan_stripmap(Vec3(1, 2, 3), Vec3(4, -1, 5), 1.7);
  CHECK(diag[0].velocity->norm() == doctest::Approx(1.7).epsilon(1e-12));
  CHECK(diag[1].velocity->norm() == doctest::Approx(1.7).epsilon(1e-12));

  CHECK_THROWS_AS(plan_stripmap(Vec3(0, 0, 0), Vec3(0, 0, 0), 1.0),
                  ConfigError);
}

TEST_CASE("solve_polynomial reproduces a constant-velocity line") {
  VertexConstraint a, b;
  a.position = Vec3(0, 0, 2);
  b.position = Vec3(5, 0, 2);
  const Vec3 vel(1, 0, 0);
  for (auto* v : {&a, &b}) {
    v->velocity = vel;
    v->acceleration = Vec3::Zero();
    v->jerk = Vec3::Zero();
    v->snap = Vec3::Zero();
    v->yaw = 0.0;
    v->yaw_rate = 0.0;
  }
  const Trajectory traj = solve_polynomial({a, b}, {5.0});
  // Coefficients above degree 1 vanish.
  for (int k = 2; k < kPosCoeffs; ++k) {
    CHECK(traj.segments[0].pos_coeffs.row(k).norm() < 1e-9);
  }
  // Acceleration identically zero along the line.
  for (double t = 0.0; t <= 5.0; t += 0.25) {
    CHECK(traj.sample(t).acceleration.norm() < 1e-9);
  }
}

TEST_CASE("solve_polynomial interpolates vertices and velocities") {
  CirclePlan plan;
  plan.center = Vec3(0, 0, 2);
  plan.radius = 7.5;
  plan.speed = 1.0;
  plan.deviation = 0.02;
  const auto vertices = plan_circle(plan);
  const auto times = circle_segment_times(plan);
  const Trajectory traj = solve_polynomial(vertices, times);

  double t = 0.0;
  for (size_t k = 0; k < vertices.size(); ++k) {
    const FlatState s = traj.sample(std::min(t, traj.duration()));
    CHECK((s.position - vertices[k].position).norm() < 1e-6);
    CHECK((s.velocity - *vertices[k].velocity).norm() < 1e-6);
    if (k < times.size()) t += times[k];
  }
}

TEST_CASE("sample continuity and finite-difference consistency") {
  CirclePlan plan;
  plan.center = Vec3(1, -2, 3);
  plan.radius = 5.0;
  plan.speed = 1.5;
  plan.deviation = 0.02;
  const Trajectory traj =
      solve_polynomial(plan_circle(plan), circle_segment_times(plan));

  // Left/right limits at interior boundaries.
  double boundary = 0.0;
  for (size_t s = 0; s + 1 < traj.segments.size(); ++s) {
    boundary += traj.segments[s].duration;
    const FlatState left = traj.sample(boundary - 1e-12);
    const FlatState right = traj.sample(boundary + 1e-12);
    CHECK((left.position - right.position).norm() < 1e-9);
    CHECK((left.velocity - right.velocity).norm() < 1e-9);
    CHECK((left.acceleration - right.acceleration).norm() < 1e-8);
    CHECK((left.jerk - right.jerk).norm() < 1e-7);
    CHECK(left.yaw == doctest::Approx(right.yaw).epsilon(1e-9));
  }

  // Central differences of position match the analytic velocity.
  const double h = 1e-4;
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> rand_t(h, traj.duration() - h);
  for (int i = 0; i < 50; ++i) {
    const double t = rand_t(rng);
    const Vec3 fd = (traj.sample(t + h).position -
                     traj.sample(t - h).position) / (2.0 * h);
    CHECK((fd - traj.sample(t).velocity).norm() < 1e-5);
  }

  CHECK_THROWS_AS(traj.sample(traj.duration() + 1.0), std::out_of_range);
}

TEST_CASE("feasibility_check thrust cases") {
  // Hover: a = 0 gives thrust exactly g, inside 9.81 +- 1.00.
  DynamicLimits limits;
  limits.f_min = 8.81;
  limits.f_max = 10.81;
  limits.v_max = 5.0;

  VertexConstraint a, b;
  a.position = Vec3::Zero();
  b.position = Vec3::Zero();
  const Trajectory hover = solve_polynomial(
      {[&] {
         VertexConstraint v = a;
         v.velocity = Vec3::Zero();
         v.acceleration = Vec3::Zero();
         v.jerk = Vec3::Zero();
         v.snap = Vec3::Zero();
         v.yaw = 0.0;
         v.yaw_rate = 0.0;
         return v;
       }(),
       [&] {
         VertexConstraint v = b;
         v.velocity = Vec3::Zero();
         v.acceleration = Vec3::Zero();
         v.jerk = Vec3::Zero();
         v.snap = Vec3::Zero();
         v.yaw = 0.0;
         v.yaw_rate = 0.0;
         return v;
       }()},
      {1.0});
  CHECK(feasibility_check(hover.segments[0], limits).feasible);

  // Constant horizontal acceleration via a quadratic segment.
  auto accel_segment = [](double ax) {
    PolySegment seg;
    seg.duration = 1.0;
    seg.pos_coeffs.setZero();
    seg.pos_coeffs(2, 0) = 0.5 * ax;  // x(t) = ax/2 t^2
    seg.yaw_coeffs.setZero();
    return seg;
  };
  // sqrt(9.8066^2 + 2^2) = 10.008 <= 10.81.
  CHECK(feasibility_check(accel_segment(2.0), limits).feasible);
  // sqrt(9.8066^2 + 5^2) = 11.007 > 10.81.
  const auto report = feasibility_check(accel_segment(5.0), limits);
  CHECK_FALSE(report.feasible);
  CHECK(report.violation == "thrust_max");
}

TEST_CASE("min_time_connection") {
  DynamicLimits limits;
  limits.f_min = 8.81;
  limits.f_max = 10.81;
  limits.v_max = 5.0;

  VertexConstraint rest;
  rest.position = Vec3(0, 0, 2);
  rest.yaw = 0.0;

  SUBCASE("rest to rest at the same position hits the minimum duration") {
    const PolySegment seg = min_time_connection(rest, rest, limits);
    CHECK(seg.duration == doctest::Approx(0.1));
  }

  SUBCASE("binary search matches a 1 ms linear scan") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> dist(0.5, 4.0);
    std::uniform_real_distribution<double> speed(0.5, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
      VertexConstraint from = rest;
      VertexConstraint to;
      to.position = rest.position + Vec3(dist(rng), dist(rng), 0.0);
      const Vec3 dir = (to.position - rest.position).normalized();
      to.velocity = speed(rng) * dir;
      to.acceleration = Vec3::Zero();
      to.jerk = Vec3::Zero();
      to.snap = Vec3::Zero();
      to.yaw = std::atan2(dir.y(), dir.x());
      to.yaw_rate = 0.0;

      const PolySegment seg = min_time_connection(from, to, limits);

      // Oracle: scan durations on the same 1 ms lattice.
      auto feasible_at = [&](double t) {
        VertexConstraint a = from, b = to;
        auto pin = [](VertexConstraint& v) {
          if (!v.velocity) v.velocity = Vec3::Zero();
          if (!v.acceleration) v.acceleration = Vec3::Zero();
          if (!v.jerk) v.jerk = Vec3::Zero();
          if (!v.snap) v.snap = Vec3::Zero();
          if (!v.yaw) v.yaw = 0.0;
          if (!v.yaw_rate) v.yaw_rate = 0.0;
        };
        pin(a);
        pin(b);
        const Trajectory tr = solve_polynomial({a, b}, {t});
        return feasibility_check(tr.segments[0], limits).feasible;
      };
      double scan = 0.1;
      while (scan < 60.0 && !feasible_at(scan)) scan += 1e-3;
      CHECK(std::abs(seg.duration - scan) <= 2e-3);

      // Minimality probe: half the duration must be infeasible.
      if (seg.duration > 0.2) {
        CHECK_FALSE(feasible_at(0.5 * seg.duration));
      }
    }
  }
}

TEST_CASE("mission planning, masks and feasibility") {
  MissionConfig config;
  config.limits.f_min = 8.81;
  config.limits.f_max = 10.81;
  config.limits.v_max = 3.0;

  SUBCASE("single circle gives one window") {
    CirclePlan plan;
    plan.center = Vec3(0, 0, 2);
    plan.radius = 7.5;
    plan.speed = 1.0;
    config.primitives.emplace_back(plan);
    const Mission mission = plan_mission(config);
    CHECK(mission.mask.size() == 1);
    CHECK(mission.trajectory.segments.front().kind ==
          SegmentKind::kAccelerate);
    CHECK(mission.trajectory.segments.back().kind == SegmentKind::kDecelerate);

    // Mask tiles the measurement segments exactly.
    double measurement_total = 0.0;
    for (const auto& seg : mission.trajectory.segments) {
      if (seg.kind == SegmentKind::kMeasurement) {
        measurement_total += seg.duration;
      }
    }
    double masked = 0.0;
    for (const auto& [t0, t1] : mission.mask) masked += t1 - t0;
    CHECK(masked == doctest::Approx(measurement_total).epsilon(1e-12));
  }

  SUBCASE("six stacked circles give six windows") {
    for (int k = 0; k < 6; ++k) {
      CirclePlan plan;
      plan.center = Vec3(0, 0, 2.0 + 0.4 * k);
      plan.radius = 7.5;
      plan.speed = 1.0;
      config.primitives.emplace_back(plan);
    }
    const Mission mission = plan_mission(config);
    CHECK(mission.mask.size() == 6);
    for (const auto& seg : mission.trajectory.segments) {
      CHECK(feasibility_check(seg, config.limits).feasible);
    }
  }

  SUBCASE("empty mission is rejected") {
    CHECK_THROWS_AS(plan_mission(config), ConfigError);
  }

  SUBCASE("empty trajectory yields empty mask") {
    CHECK(mission_mask(Trajectory{}).empty());
  }
}

TEST_CASE("measurement speed stays within 5 percent of commanded") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> rand_r(4.0, 15.0);
  std::uniform_real_distribution<double> rand_v(0.5, 2.0);
  std::uniform_real_distribution<double> rand_d(0.005, 0.05);
  for (int trial = 0; trial < 10; ++trial) {
    CirclePlan plan;
    plan.center = Vec3(0, 0, 3);
    plan.radius = rand_r(rng);
    plan.speed = rand_v(rng);
    plan.deviation = rand_d(rng);
    const Trajectory traj =
        solve_polynomial(plan_circle(plan), circle_segment_times(plan));
    for (double t = 0.0; t <= traj.duration(); t += 0.01) {
      const double speed = traj.sample(t).velocity.norm();
      CHECK(std::abs(speed - plan.speed) <= 0.05 * plan.speed);
    }
  }
}
