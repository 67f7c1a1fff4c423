#include "gpsar/control/tracker.hpp"

#include <cmath>

namespace gpsar::ctrl {

double wrap_angle(double angle) {
  angle = std::fmod(angle, 2.0 * M_PI);
  if (angle > M_PI) angle -= 2.0 * M_PI;
  if (angle <= -M_PI) angle += 2.0 * M_PI;
  return angle;
}

Command track(const FlatState& ref, const VehicleEstimate& est,
              const Gains& gains, const CommandLimits& limits) {
  Command cmd;
  cmd.velocity = gains.kp.cwiseProduct(ref.position - est.position) +
                 gains.kv.cwiseProduct(ref.velocity - est.velocity) +
                 gains.ka.cwiseProduct(ref.acceleration - est.acceleration);

  Eigen::Vector2d horizontal = cmd.velocity.head<2>();
  const double hnorm = horizontal.norm();
  if (hnorm > limits.max_horizontal_speed) {
    horizontal *= limits.max_horizontal_speed / hnorm;
  }
  cmd.velocity.head<2>() = horizontal;
  cmd.velocity.z() = std::clamp(cmd.velocity.z(), -limits.max_vertical_speed,
                                limits.max_vertical_speed);

  const double yaw_err = wrap_angle(ref.yaw - est.yaw);
  cmd.yaw_rate = gains.kpsi * yaw_err +
                 gains.kpsi_dot * (ref.yaw_rate - est.yaw_rate);
  cmd.yaw_rate = std::clamp(cmd.yaw_rate, -limits.max_yaw_rate,
                            limits.max_yaw_rate);
  return cmd;
}

}  // namespace gpsar::ctrl
