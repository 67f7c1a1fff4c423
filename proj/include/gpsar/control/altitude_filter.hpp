#pragma once

#include "gpsar/core/types.hpp"

namespace gpsar::ctrl {

struct AltitudeFilterState {
  double agl = 0.0;       // estimated altitude above ground, m
  double variance = 1.0;  // m^2
};

struct AltimeterParams {
  double base_std = 0.1;           // m
  double attitude_scale = 2.0;     // 1/rad
  double attitude_cutoff = M_PI / 6.0;
  double mahalanobis_gate = 3.0;
  double range_scale = 0.02;       // 1/m
  double max_range = 50.0;         // m
};

// Process step driven by the change in autopilot altitude.
AltitudeFilterState alt_predict(const AltitudeFilterState& state,
                                double delta_z, double process_noise);

struct AltitudeUpdate {
  AltitudeFilterState state;
  bool accepted = false;
};

// Tilt-corrects the range to a vertical distance (plane-ground assumption),
// inflates the measurement std with attitude and range, then applies the
// cutoff and Mahalanobis gates before the scalar Kalman update. Rejected
// measurements leave the state untouched.
AltitudeUpdate alt_update(const AltitudeFilterState& state, double range,
                          double roll, double pitch,
                          const AltimeterParams& params);

}  // namespace gpsar::ctrl
