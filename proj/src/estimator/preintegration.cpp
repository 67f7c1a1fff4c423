#include "gpsar/estimator/preintegration.hpp"

namespace gpsar::est {

void imu_forward_step(const ImuStepInput& in, const Vec3& gravity, Rot3* r,
                      Vec3* v, Vec3* p) {
  const Vec3 w_mid = 0.5 * (in.gyro_k + in.gyro_k1);
  const Vec3 a_mid = 0.5 * (in.accel_k + in.accel_k1);
  const Rot3 r_half = (*r) * Rot3::exp(0.5 * w_mid * in.dt);
  const Vec3 a_world = r_half * a_mid + gravity;
  *p += (*v) * in.dt + 0.5 * a_world * in.dt * in.dt;
  *v += a_world * in.dt;
  *r = (*r) * Rot3::exp(w_mid * in.dt);
}

PreintegratedImu::PreintegratedImu(std::vector<ImuMeasurement> samples,
                                   const Vec3& accel_bias,
                                   const Vec3& gyro_bias, double sigma_a,
                                   double sigma_g)
    : samples_(std::move(samples)), sigma_a_(sigma_a), sigma_g_(sigma_g) {
  if (samples_.size() < 2) {
    throw ConfigError("preintegration needs at least two samples");
  }
  for (size_t k = 0; k + 1 < samples_.size(); ++k) {
    if (!(samples_[k + 1].t > samples_[k].t)) {
      throw ConfigError("imu samples out of order");
    }
  }
  reintegrate(accel_bias, gyro_bias);
}

void PreintegratedImu::reintegrate(const Vec3& accel_bias,
                                   const Vec3& gyro_bias) {
  ba_ = accel_bias;
  bg_ = gyro_bias;
  dt_total_ = 0.0;
  delta_r_ = Rot3();
  delta_v_.setZero();
  delta_p_.setZero();
  cov_.setZero();
  dr_dbg_.setZero();
  dv_dba_.setZero();
  dv_dbg_.setZero();
  dp_dba_.setZero();
  dp_dbg_.setZero();

  for (size_t k = 0; k + 1 < samples_.size(); ++k) {
    const double dt = samples_[k + 1].t - samples_[k].t;
    const Vec3 w_mid =
        0.5 * (samples_[k].gyro + samples_[k + 1].gyro) - bg_;
    const Vec3 a_mid =
        0.5 * (samples_[k].accel + samples_[k + 1].accel) - ba_;

    const Vec3 phi = w_mid * dt;
    const Mat3 a_full = Rot3::exp(phi).matrix();
    const Mat3 a_half = Rot3::exp(0.5 * phi).matrix();
    const Mat3 jr_full = so3_right_jacobian(phi);
    const Mat3 jr_half = so3_right_jacobian(0.5 * phi);
    const Mat3 r_half = delta_r_.matrix() * a_half;
    const Mat3 a_hat = skew(a_mid);

    // Perturbation of the half-step rotation under a gyro bias move,
    // expressed as a right tangent on delta_r * exp(phi/2).
    const Mat3 j_half = a_half.transpose() * dr_dbg_ - 0.5 * dt * jr_half;

    // Covariance first (uses the pre-update deltas). Error order (th,v,p).
    Mat9 f = Mat9::Identity();
    f.block<3, 3>(0, 0) = a_full.transpose();
    f.block<3, 3>(3, 0) = -r_half * a_hat * a_half.transpose() * dt;
    f.block<3, 3>(6, 0) = -0.5 * r_half * a_hat * a_half.transpose() * dt * dt;
    f.block<3, 3>(6, 3) = Mat3::Identity() * dt;
    Eigen::Matrix<double, 9, 6> g = Eigen::Matrix<double, 9, 6>::Zero();
    g.block<3, 3>(0, 0) = jr_full * dt;
    g.block<3, 3>(3, 3) = r_half * dt;
    g.block<3, 3>(6, 3) = 0.5 * r_half * dt * dt;
    Mat6 qd = Mat6::Zero();
    qd.topLeftCorner<3, 3>() = (sigma_g_ * sigma_g_ / dt) * Mat3::Identity();
    qd.bottomRightCorner<3, 3>() =
        (sigma_a_ * sigma_a_ / dt) * Mat3::Identity();
    cov_ = f * cov_ * f.transpose() + g * qd * g.transpose();

    // Bias sensitivities; position and velocity use the pre-update values.
    dp_dba_ += dv_dba_ * dt - 0.5 * r_half * dt * dt;
    dp_dbg_ += dv_dbg_ * dt - 0.5 * r_half * a_hat * j_half * dt * dt;
    dv_dba_ += -r_half * dt;
    dv_dbg_ += -r_half * a_hat * j_half * dt;
    dr_dbg_ = a_full.transpose() * dr_dbg_ - jr_full * dt;

    // Deltas.
    delta_p_ += delta_v_ * dt + 0.5 * r_half * a_mid * dt * dt;
    delta_v_ += r_half * a_mid * dt;
    delta_r_ = delta_r_ * Rot3::exp(phi);
    dt_total_ += dt;
  }
}

}  // namespace gpsar::est
