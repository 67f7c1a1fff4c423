#include "gpsar/estimator/init.hpp"

#include <cmath>

namespace gpsar::est {

namespace {

Mat3 triad_frame(const Vec3& primary, const Vec3& secondary) {
  const Vec3 t1 = primary.normalized();
  const Vec3 cross = primary.cross(secondary);
  const double angle =
      std::asin(std::min(1.0, cross.norm() /
                                  (primary.norm() * secondary.norm())));
  if (angle < 5.0 * M_PI / 180.0) {
    throw NumericalError("triad vectors closer than 5 deg to parallel");
  }
  const Vec3 t2 = cross.normalized();
  const Vec3 t3 = t1.cross(t2);
  Mat3 m;
  m.col(0) = t1;
  m.col(1) = t2;
  m.col(2) = t3;
  return m;
}

}  // namespace

Rot3 triad_init(const Vec3& accel_standstill, const Vec3& baseline_inertial,
                const Vec3& baseline_body) {
  if (accel_standstill.norm() < 1e-6 || baseline_inertial.norm() < 1e-6 ||
      baseline_body.norm() < 1e-6) {
    throw NumericalError("triad input vector is (near) zero");
  }
  const Vec3 gravity_inertial(0.0, 0.0, -1.0);
  const Vec3 gravity_body = -accel_standstill;
  const Mat3 mi = triad_frame(gravity_inertial, baseline_inertial);
  const Mat3 mb = triad_frame(gravity_body, baseline_body);
  // Re-orthonormalization happens inside the Rot3 constructor.
  return Rot3(Mat3(mi * mb.transpose()));
}

Vec3 initial_position(const GnssPosition& gnss, const Rot3& r0,
                      const Vec3& lever_pos) {
  return gnss.position - r0 * lever_pos;
}

Vec3 gyro_bias_init(const std::vector<ImuMeasurement>& standstill,
                    double sigma_g_discrete) {
  if (standstill.size() < 100) {
    throw ConfigError("gyro bias init needs at least 100 samples");
  }
  Vec3 mean = Vec3::Zero();
  for (const auto& m : standstill) mean += m.gyro;
  mean /= static_cast<double>(standstill.size());

  Vec3 var = Vec3::Zero();
  for (const auto& m : standstill) {
    var += (m.gyro - mean).cwiseAbs2();
  }
  var /= static_cast<double>(standstill.size());
  const double max_std = std::sqrt(var.maxCoeff());
  if (max_std > 5.0 * sigma_g_discrete) {
    throw NumericalError("platform not at standstill during gyro bias init");
  }
  return mean;
}

}  // namespace gpsar::est
