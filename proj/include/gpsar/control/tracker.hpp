#pragma once

#include "gpsar/trajectory/polynomial.hpp"

namespace gpsar::ctrl {

using traj::FlatState;

// With a velocity-command autopilot the position error is the integrator,
// so cruise at speed v trails by v / kp; kp is sized for decimeter lag.
struct Gains {
  Vec3 kp = Vec3::Constant(8.0);
  Vec3 kv = Vec3::Constant(1.2);
  Vec3 ka = Vec3::Constant(0.1);
  double kpsi = 1.5;
  double kpsi_dot = 0.2;
};

struct CommandLimits {
  double max_horizontal_speed = 3.0;
  double max_vertical_speed = 1.5;
  double max_yaw_rate = M_PI / 6.0;
};

struct VehicleEstimate {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Vec3 acceleration = Vec3::Zero();
  double yaw = 0.0;
  double yaw_rate = 0.0;
};

struct Command {
  Vec3 velocity = Vec3::Zero();
  double yaw_rate = 0.0;
};

// Maps an angle difference to (-pi, pi].
double wrap_angle(double angle);

// Velocity-reference tracking law: the position error acts as the
// integrator, the acceleration error as damping. The output is limited
// norm-preserving in the horizontal plane.
Command track(const FlatState& ref, const VehicleEstimate& est,
              const Gains& gains, const CommandLimits& limits);

}  // namespace gpsar::ctrl
