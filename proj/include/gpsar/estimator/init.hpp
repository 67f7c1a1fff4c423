#pragma once

#include "gpsar/estimator/types.hpp"

namespace gpsar::est {

// TRIAD attitude from the gravity pair ((0,0,-1), -a0) and the antenna
// baseline pair (measured in I, known in B from CAD). Throws NumericalError
// when either pair is closer than 5 degrees to parallel.
Rot3 triad_init(const Vec3& accel_standstill, const Vec3& baseline_inertial,
                const Vec3& baseline_body);

// r_IB(0) = r_IP - R_IB(0) * r_BP(0).
Vec3 initial_position(const GnssPosition& gnss, const Rot3& r0,
                      const Vec3& lever_pos);

// Mean of the standstill gyro samples. Throws NumericalError when the
// sample spread indicates motion (std above 5x the discrete gyro sigma).
Vec3 gyro_bias_init(const std::vector<ImuMeasurement>& standstill,
                    double sigma_g_discrete);

}  // namespace gpsar::est
