#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gpsar/core/types.hpp"

namespace gpsar::traj {

// Position polynomials are degree 9 (snap-continuous); free vertex
// derivatives are chosen by minimizing the integral of squared snap.
inline constexpr int kPosCoeffs = 10;
inline constexpr int kPosOrders = 5;  // orders 0..4 parameterize a segment end
// Yaw uses an independent degree-5 polynomial continuous up to yaw accel.
inline constexpr int kYawCoeffs = 6;
inline constexpr int kYawOrders = 3;

// A time-free support vertex. Unset derivatives are left to the optimizer.
struct VertexConstraint {
  Vec3 position = Vec3::Zero();
  std::optional<Vec3> velocity;
  std::optional<Vec3> acceleration;
  std::optional<Vec3> jerk;
  std::optional<Vec3> snap;
  std::optional<double> yaw;
  std::optional<double> yaw_rate;
};

enum class SegmentKind { kMeasurement, kAccelerate, kDecelerate, kTransfer };

std::string to_string(SegmentKind kind);

struct PolySegment {
  // Row k holds the t^k coefficient (local segment time, seconds).
  Eigen::Matrix<double, kPosCoeffs, 3> pos_coeffs =
      Eigen::Matrix<double, kPosCoeffs, 3>::Zero();
  Eigen::Matrix<double, kYawCoeffs, 1> yaw_coeffs =
      Eigen::Matrix<double, kYawCoeffs, 1>::Zero();
  double duration = 0.0;
  SegmentKind kind = SegmentKind::kMeasurement;
};

// Full desired state of the differentially flat platform.
struct FlatState {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Vec3 acceleration = Vec3::Zero();
  Vec3 jerk = Vec3::Zero();
  double yaw = 0.0;
  double yaw_rate = 0.0;
  double yaw_accel = 0.0;
};

struct Trajectory {
  std::vector<PolySegment> segments;
  double start_time = 0.0;

  double duration() const;
  double end_time() const { return start_time + duration(); }
  bool empty() const { return segments.empty(); }

  // Absolute-time evaluation; throws std::out_of_range outside the span.
  FlatState sample(double t) const;
};

// Evaluates a single segment at local time t in [0, duration].
FlatState sample_segment(const PolySegment& seg, double t);

// Thrust is the specific force magnitude |a - g_vec|; f_min < g < f_max.
struct DynamicLimits {
  double f_min = 8.81;
  double f_max = 10.81;
  double v_max = 5.0;
  double tilt_rate_max = M_PI / 12.0;  // roll/pitch rate bound, rad/s
  double yaw_acc_max = M_PI / 2.0;     // rad/s^2
};

struct FeasibilityReport {
  bool feasible = true;
  std::string violation;  // empty when feasible
  double time = 0.0;      // local segment time of the first violation
  double value = 0.0;
  double limit = 0.0;
};

// Samples the segment at 1 ms and checks thrust, speed, the roll/pitch
// rate proxy |jerk|/thrust and yaw acceleration against the limits.
FeasibilityReport feasibility_check(const PolySegment& seg,
                                    const DynamicLimits& limits);

// Fits one polynomial chain through the vertices. Fixed derivatives are
// met exactly; free ones minimize the squared-snap integral. Throws
// NumericalError if the constraint system is rank-deficient.
Trajectory solve_polynomial(const std::vector<VertexConstraint>& vertices,
                            const std::vector<double>& segment_times,
                            SegmentKind kind = SegmentKind::kMeasurement);

struct MinTimeOptions {
  double min_duration = 0.1;
  double tolerance = 1e-3;
  double max_duration = 60.0;
};

// Shortest-duration feasible segment between two vertices: doubling until
// feasible, then a binary search down to the tolerance. Unset derivatives
// on either vertex are pinned to zero. Throws NumericalError when no
// feasible duration exists below the cap.
PolySegment min_time_connection(const VertexConstraint& from,
                                const VertexConstraint& to,
                                const DynamicLimits& limits,
                                const MinTimeOptions& opts = {});

// (t_start, t_end) absolute-time windows, one per run of consecutive
// measurement segments; disjoint and sorted.
std::vector<std::pair<double, double>> mission_mask(const Trajectory& traj);

}  // namespace gpsar::traj
