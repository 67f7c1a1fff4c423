#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace gpsar {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Vec9 = Eigen::Matrix<double, 9, 1>;
using Mat9 = Eigen::Matrix<double, 9, 9>;

// Seconds since epoch in GNSS time.
using Timestamp = double;

// Standard gravity, ENU inertial frame with +z up: g_vec = (0, 0, -kGravity).
inline constexpr double kGravity = 9.8066;

inline Vec3 gravity_vector() { return Vec3(0.0, 0.0, -kGravity); }

// User / configuration mistakes. The CLI maps these to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failures (singular systems, divergence). CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace gpsar
