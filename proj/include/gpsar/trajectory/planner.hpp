#pragma once

#include <variant>

#include "gpsar/trajectory/polynomial.hpp"

namespace gpsar::traj {

// Circular arc by center, radius, start angle and subtended angle, flown
// counter-clockwise at constant speed. The deviation parameter d bounds
// the radial error of the chord polyline to d * radius.
struct CirclePlan {
  Vec3 center = Vec3::Zero();  // includes the flight altitude
  double radius = 7.5;
  double start_angle = 0.0;
  double angle = 2.0 * M_PI;
  double speed = 1.0;
  double deviation = 0.02;
};

struct StripmapPlan {
  Vec3 start = Vec3::Zero();
  Vec3 end = Vec3::Zero();
  double speed = 1.0;
};

using MissionPrimitive = std::variant<CirclePlan, StripmapPlan>;

struct MissionConfig {
  std::vector<MissionPrimitive> primitives;
  DynamicLimits limits;
  double start_time = 0.0;
};

struct Mission {
  Trajectory trajectory;
  std::vector<std::pair<double, double>> mask;
};

// M = ceil(theta / arccos(2(1-d)^2 - 1)); chords between the M+1 vertices
// deviate radially by at most d * r. Throws ConfigError for d outside (0,1).
int circle_vertex_count(double theta, double d);

// M+1 vertices on the circle; tangential velocity of norm speed, yaw along
// the velocity, all higher fixed derivatives zero.
std::vector<VertexConstraint> plan_circle(const CirclePlan& plan);

// Start and goal vertex with velocity pointing at the goal.
std::vector<VertexConstraint> plan_stripmap(const Vec3& start, const Vec3& end,
                                            double speed);

// Nominal segment times for a vertex chain at constant speed: arc length
// over speed for circles, straight distance over speed for stripmaps.
std::vector<double> circle_segment_times(const CirclePlan& plan);

// Full mission: each primitive gets an acceleration run-up from rest and a
// deceleration to rest; consecutive primitives are joined by rest-to-rest
// transfers found with the minimum segment time search.
Mission plan_mission(const MissionConfig& config);

}  // namespace gpsar::traj
