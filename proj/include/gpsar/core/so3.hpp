#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include "gpsar/core/types.hpp"

namespace gpsar {

// [v]_x such that skew(v) * w == v.cross(w).
Mat3 skew(const Vec3& v);

// Rotation on SO(3). Unit quaternion storage, matrix on demand; the
// quaternion is renormalized on construction so long integration chains
// do not drift off the manifold.
class Rot3 {
 public:
  Rot3() : q_(Eigen::Quaterniond::Identity()) {}
  explicit Rot3(const Eigen::Quaterniond& q) : q_(q.normalized()) {}
  explicit Rot3(const Mat3& m) : q_(Eigen::Quaterniond(m).normalized()) {}

  static Rot3 identity() { return Rot3(); }

  // Rodrigues / exponential map. exp(0) = I, Taylor branch below 1e-8.
  static Rot3 exp(const Vec3& omega);

  // Axis-angle log, |log| < pi for the principal branch.
  Vec3 log() const;

  Mat3 matrix() const { return q_.toRotationMatrix(); }
  const Eigen::Quaterniond& quaternion() const { return q_; }

  Rot3 operator*(const Rot3& other) const { return Rot3(q_ * other.q_); }
  Vec3 operator*(const Vec3& v) const { return q_ * v; }

  Rot3 inverse() const { return Rot3(q_.conjugate()); }
  Vec3 unrotate(const Vec3& v) const { return q_.conjugate() * v; }

  Rot3 slerp(const Rot3& other, double t) const {
    return Rot3(q_.slerp(t, other.q_));
  }

  static Rot3 rot_z(double angle) {
    return Rot3(Eigen::Quaterniond(Eigen::AngleAxisd(angle, Vec3::UnitZ())));
  }

  // Angle of the relative rotation this^-1 * other.
  double angular_distance(const Rot3& other) const {
    return (inverse() * other).log().norm();
  }

 private:
  Eigen::Quaterniond q_;
};

// Right Jacobian of the exponential map and its inverse, used by the
// preintegration recursions and rotation residuals.
Mat3 so3_right_jacobian(const Vec3& omega);
Mat3 so3_right_jacobian_inverse(const Vec3& omega);

inline Rot3 so3_exp(const Vec3& omega) { return Rot3::exp(omega); }
inline Vec3 so3_log(const Rot3& r) { return r.log(); }

}  // namespace gpsar
