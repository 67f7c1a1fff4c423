#include "gpsar/control/altitude_filter.hpp"

#include <cmath>

namespace gpsar::ctrl {

AltitudeFilterState alt_predict(const AltitudeFilterState& state,
                                double delta_z, double process_noise) {
  return {state.agl + delta_z, state.variance + process_noise};
}

AltitudeUpdate alt_update(const AltitudeFilterState& state, double range,
                          double roll, double pitch,
                          const AltimeterParams& params) {
  AltitudeUpdate out{state, false};
  const double tilt = std::max(std::abs(roll), std::abs(pitch));
  if (tilt > params.attitude_cutoff || range > params.max_range ||
      range < 0.0) {
    return out;
  }

  const double z = range * std::cos(roll) * std::cos(pitch);
  const double std_scaled = params.base_std *
                            (1.0 + params.attitude_scale * tilt) *
                            (1.0 + params.range_scale * range);
  const double r = std_scaled * std_scaled;

  const double innovation = z - state.agl;
  const double s = state.variance + r;
  if (innovation * innovation > params.mahalanobis_gate *
                                params.mahalanobis_gate * s) {
    return out;
  }

  const double gain = state.variance / s;
  out.state.agl = state.agl + gain * innovation;
  out.state.variance = (1.0 - gain) * state.variance;
  out.accepted = true;
  return out;
}

}  // namespace gpsar::ctrl
