#include "gpsar/core/so3.hpp"

#include <cmath>

namespace gpsar {

Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

Rot3 Rot3::exp(const Vec3& omega) {
  const double theta2 = omega.squaredNorm();
  if (theta2 < 1e-16) {
    // First order quaternion, renormalized by the constructor.
    return Rot3(Eigen::Quaterniond(1.0, 0.5 * omega.x(), 0.5 * omega.y(),
                                   0.5 * omega.z()));
  }
  const double theta = std::sqrt(theta2);
  const Vec3 axis = omega / theta;
  return Rot3(Eigen::Quaterniond(Eigen::AngleAxisd(theta, axis)));
}

Vec3 Rot3::log() const {
  Eigen::Quaterniond q = q_;
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  const double vn = q.vec().norm();
  if (vn < 1e-12) {
    return 2.0 * q.vec();
  }
  const double angle = 2.0 * std::atan2(vn, q.w());
  return (angle / vn) * q.vec();
}

Mat3 so3_right_jacobian(const Vec3& omega) {
  const double theta2 = omega.squaredNorm();
  const Mat3 w = skew(omega);
  if (theta2 < 1e-12) {
    return Mat3::Identity() - 0.5 * w + (1.0 / 6.0) * w * w;
  }
  const double theta = std::sqrt(theta2);
  const double a = (1.0 - std::cos(theta)) / theta2;
  const double b = (theta - std::sin(theta)) / (theta2 * theta);
  return Mat3::Identity() - a * w + b * w * w;
}

Mat3 so3_right_jacobian_inverse(const Vec3& omega) {
  const double theta2 = omega.squaredNorm();
  const Mat3 w = skew(omega);
  if (theta2 < 1e-12) {
    return Mat3::Identity() + 0.5 * w + (1.0 / 12.0) * w * w;
  }
  const double theta = std::sqrt(theta2);
  const double c = 1.0 / theta2 -
                   (1.0 + std::cos(theta)) / (2.0 * theta * std::sin(theta));
  return Mat3::Identity() + 0.5 * w + c * w * w;
}

}  // namespace gpsar
