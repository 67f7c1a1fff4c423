#pragma once

#include "gpsar/estimator/types.hpp"

namespace gpsar::est {

// Relative motion between two epochs summarized from the 1 kHz IMU stream.
// Midpoint (trapezoidal) integration of bias-corrected samples; gravity is
// not applied here, it enters the residual. The raw samples are kept so the
// factor can re-integrate exactly when the linearization bias moves.
class PreintegratedImu {
 public:
  PreintegratedImu() = default;

  // Samples must be time-ordered and cover [samples.front().t,
  // samples.back().t]; at least two are required.
  PreintegratedImu(std::vector<ImuMeasurement> samples, const Vec3& accel_bias,
                   const Vec3& gyro_bias, double sigma_a, double sigma_g);

  void reintegrate(const Vec3& accel_bias, const Vec3& gyro_bias);

  double delta_t() const { return dt_total_; }
  const Rot3& delta_r() const { return delta_r_; }
  const Vec3& delta_v() const { return delta_v_; }
  const Vec3& delta_p() const { return delta_p_; }
  const Mat9& covariance() const { return cov_; }
  const Vec3& accel_bias() const { return ba_; }
  const Vec3& gyro_bias() const { return bg_; }

  // First-order sensitivities of the deltas to the linearization biases.
  const Mat3& dr_dbg() const { return dr_dbg_; }
  const Mat3& dv_dba() const { return dv_dba_; }
  const Mat3& dv_dbg() const { return dv_dbg_; }
  const Mat3& dp_dba() const { return dp_dba_; }
  const Mat3& dp_dbg() const { return dp_dbg_; }

  const std::vector<ImuMeasurement>& samples() const { return samples_; }

  // Largest component move of a bias since integration.
  double bias_drift(const Vec3& accel_bias, const Vec3& gyro_bias) const {
    return std::max((accel_bias - ba_).cwiseAbs().maxCoeff(),
                    (gyro_bias - bg_).cwiseAbs().maxCoeff());
  }

 private:
  std::vector<ImuMeasurement> samples_;
  double sigma_a_ = 0.0, sigma_g_ = 0.0;
  Vec3 ba_ = Vec3::Zero(), bg_ = Vec3::Zero();

  double dt_total_ = 0.0;
  Rot3 delta_r_;
  Vec3 delta_v_ = Vec3::Zero();
  Vec3 delta_p_ = Vec3::Zero();
  Mat9 cov_ = Mat9::Zero();  // order (theta, v, p)
  Mat3 dr_dbg_ = Mat3::Zero();
  Mat3 dv_dba_ = Mat3::Zero(), dv_dbg_ = Mat3::Zero();
  Mat3 dp_dba_ = Mat3::Zero(), dp_dbg_ = Mat3::Zero();
};

// One midpoint step of the forward model shared by the simulator, the
// preintegrator and the high-rate propagation: consumes the two samples
// bounding [t_k, t_k+1] already corrected for bias.
struct ImuStepInput {
  Vec3 accel_k, accel_k1;  // specific force, body frame
  Vec3 gyro_k, gyro_k1;
  double dt;
};

void imu_forward_step(const ImuStepInput& in, const Vec3& gravity, Rot3* r,
                      Vec3* v, Vec3* p);

}  // namespace gpsar::est
