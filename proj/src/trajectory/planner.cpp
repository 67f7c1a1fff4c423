#include "gpsar/trajectory/planner.hpp"

#include <cmath>

namespace gpsar::traj {

namespace {

VertexConstraint rest_vertex(const Vec3& position, double yaw) {
  VertexConstraint v;
  v.position = position;
  v.velocity = Vec3::Zero();
  v.acceleration = Vec3::Zero();
  v.jerk = Vec3::Zero();
  v.snap = Vec3::Zero();
  v.yaw = yaw;
  v.yaw_rate = 0.0;
  return v;
}

// Distance needed to come up to speed with roughly half the available
// horizontal acceleration; keeps the run-up from degenerating at low speed.
double run_up_distance(double speed, const DynamicLimits& limits) {
  const double a_horiz =
      std::sqrt(std::max(limits.f_max * limits.f_max - kGravity * kGravity,
                         0.25));
  return std::max(0.5, speed * speed / a_horiz);
}

}  // namespace

int circle_vertex_count(double theta, double d) {
  if (!(d > 0.0 && d < 1.0)) {
    throw ConfigError("circle deviation parameter must be in (0,1)");
  }
  if (!(theta > 0.0)) {
    throw ConfigError("subtended angle must be positive");
  }
  const double step = std::acos(2.0 * (1.0 - d) * (1.0 - d) - 1.0);
  return std::max(1, static_cast<int>(std::ceil(theta / step)));
}

std::vector<VertexConstraint> plan_circle(const CirclePlan& plan) {
  if (!(plan.radius > 0.0) || !(plan.speed > 0.0)) {
    throw ConfigError("circle radius and speed must be positive");
  }
  const int m = circle_vertex_count(plan.angle, plan.deviation);
  const double alpha = plan.angle / m;
  const double omega = plan.speed / plan.radius;

  std::vector<VertexConstraint> vertices(m + 1);
  for (int k = 0; k <= m; ++k) {
    const double psi = plan.start_angle + k * alpha;
    VertexConstraint& v = vertices[k];
    v.position = plan.center +
                 plan.radius * Vec3(std::cos(psi), std::sin(psi), 0.0);
    v.velocity = plan.speed * Vec3(-std::sin(psi), std::cos(psi), 0.0);
    v.acceleration = Vec3::Zero();
    v.jerk = Vec3::Zero();
    v.snap = Vec3::Zero();
    v.yaw = std::atan2(v.velocity->y(), v.velocity->x());
    v.yaw_rate = omega;
  }
  return vertices;
}

std::vector<VertexConstraint> plan_stripmap(const Vec3& start, const Vec3& end,
                                            double speed) {
  const Vec3 diff = end - start;
  if (diff.norm() < 1e-6) {
    throw ConfigError("stripmap start and end coincide");
  }
  if (!(speed > 0.0)) {
    throw ConfigError("stripmap speed must be positive");
  }
  const Vec3 vel = speed * diff.normalized();
  const double yaw = std::atan2(vel.y(), vel.x());

  std::vector<VertexConstraint> vertices(2);
  for (auto& v : vertices) {
    v.velocity = vel;
    v.acceleration = Vec3::Zero();
    v.jerk = Vec3::Zero();
    v.snap = Vec3::Zero();
    v.yaw = yaw;
    v.yaw_rate = 0.0;
  }
  vertices[0].position = start;
  vertices[1].position = end;
  return vertices;
}

std::vector<double> circle_segment_times(const CirclePlan& plan) {
  const int m = circle_vertex_count(plan.angle, plan.deviation);
  const double arc = plan.radius * plan.angle / m;
  return std::vector<double>(m, arc / plan.speed);
}

Mission plan_mission(const MissionConfig& config) {
  if (config.primitives.empty()) {
    throw ConfigError("mission has no primitives");
  }

  Mission mission;
  mission.trajectory.start_time = config.start_time;
  auto& segments = mission.trajectory.segments;

  std::optional<VertexConstraint> previous_rest;
  for (const auto& primitive : config.primitives) {
    std::vector<VertexConstraint> vertices;
    std::vector<double> times;
    double speed = 0.0;
    if (const auto* circle = std::get_if<CirclePlan>(&primitive)) {
      vertices = plan_circle(*circle);
      times = circle_segment_times(*circle);
      speed = circle->speed;
    } else {
      const auto& strip = std::get<StripmapPlan>(primitive);
      vertices = plan_stripmap(strip.start, strip.end, strip.speed);
      times = {(strip.end - strip.start).norm() / strip.speed};
      speed = strip.speed;
    }

    const double run_up = run_up_distance(speed, config.limits);
    const Vec3 entry_dir = vertices.front().velocity->normalized();
    const Vec3 exit_dir = vertices.back().velocity->normalized();
    VertexConstraint start_rest = rest_vertex(
        vertices.front().position - run_up * entry_dir,
        *vertices.front().yaw);
    VertexConstraint end_rest = rest_vertex(
        vertices.back().position + run_up * exit_dir, *vertices.back().yaw);

    if (previous_rest) {
      PolySegment transfer = min_time_connection(
          *previous_rest, start_rest, config.limits);
      transfer.kind = SegmentKind::kTransfer;
      segments.push_back(transfer);
    }

    PolySegment accel =
        min_time_connection(start_rest, vertices.front(), config.limits);
    accel.kind = SegmentKind::kAccelerate;
    segments.push_back(accel);

    Trajectory measurement = solve_polynomial(vertices, times,
                                              SegmentKind::kMeasurement);
    for (auto& seg : measurement.segments) segments.push_back(seg);

    PolySegment decel =
        min_time_connection(vertices.back(), end_rest, config.limits);
    decel.kind = SegmentKind::kDecelerate;
    segments.push_back(decel);

    previous_rest = end_rest;
  }

  for (size_t i = 0; i < segments.size(); ++i) {
    const FeasibilityReport report =
        feasibility_check(segments[i], config.limits);
    if (!report.feasible) {
      throw ConfigError("mission infeasible at segment " + std::to_string(i) +
                        " (" + to_string(segments[i].kind) + "): " +
                        report.violation + " " +
                        std::to_string(report.value) + " vs limit " +
                        std::to_string(report.limit));
    }
  }

  mission.mask = mission_mask(mission.trajectory);
  return mission;
}

}  // namespace gpsar::traj
