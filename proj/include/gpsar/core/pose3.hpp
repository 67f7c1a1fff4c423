#pragma once

#include "gpsar/core/so3.hpp"

namespace gpsar {

// Rigid transform on SE(3). T_AB maps points from frame B to frame A.
class Pose3 {
 public:
  Pose3() : t_(Vec3::Zero()) {}
  Pose3(const Rot3& r, const Vec3& t) : r_(r), t_(t) {}

  static Pose3 identity() { return Pose3(); }

  const Rot3& rotation() const { return r_; }
  const Vec3& translation() const { return t_; }

  Pose3 operator*(const Pose3& other) const {
    return Pose3(r_ * other.r_, t_ + r_ * other.t_);
  }

  Vec3 transform(const Vec3& p) const { return t_ + r_ * p; }

  Pose3 inverse() const {
    const Rot3 rinv = r_.inverse();
    return Pose3(rinv, -(rinv * t_));
  }

  // Spherical-linear on rotation, linear on translation.
  Pose3 interpolate(const Pose3& other, double alpha) const {
    return Pose3(r_.slerp(other.r_, alpha),
                 (1.0 - alpha) * t_ + alpha * other.t_);
  }

 private:
  Rot3 r_;
  Vec3 t_;
};

}  // namespace gpsar
