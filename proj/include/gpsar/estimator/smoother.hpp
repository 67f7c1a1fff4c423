#pragma once

#include "gpsar/estimator/solver.hpp"

namespace gpsar::est {

struct SensorStreams {
  std::vector<ImuMeasurement> imu;
  std::vector<GnssPosition> gnss_pos;
  std::vector<MovingBaseline> gnss_mb;
};

struct EstimatorOptions {
  NoiseConfig noise;
  double window = 3.0;  // s; infinity disables marginalization
  bool use_moving_baseline = true;
  double heading_offset = 0.0;  // rad, applied to the initial orientation
  // Prior lever arms from CAD: [r_BP; r_BM].
  Vec6 lever_prior = Vec6::Zero();
  bool run_batch = true;
  GnOptions gn;
  LmOptions lm;
};

// Epoch skeleton shared by the online and batch passes: one node per GNSS
// measurement time, preintegrated IMU between consecutive nodes.
struct EpochData {
  double t = 0.0;
  std::optional<GnssPosition> position;
  std::optional<MovingBaseline> baseline;
};

struct GraphSetup {
  std::vector<EpochData> epochs;
  // Sample index ranges into the IMU stream per inter-epoch interval;
  // interval i covers [epochs[i], epochs[i+1]] inclusive of both boundary
  // samples for the trapezoidal rule.
  std::vector<std::pair<int, int>> imu_spans;
  NavState prior_state;
  Vec6 prior_bias = Vec6::Zero();
  Vec9 prior_state_sigmas = Vec9::Ones();
  Vec6 prior_bias_sigmas = Vec6::Ones();
  Vec6 prior_lever_sigmas = Vec6::Ones();
};

// Validates the streams (ordering, IMU gaps), derives the epoch layout and
// the standstill initialization (TRIAD attitude, initial position, gyro
// bias averaging). Throws ConfigError on malformed input.
GraphSetup prepare_graph(const SensorStreams& streams,
                         const EstimatorOptions& opts);

// Builds the full batch graph over all epochs (fresh preintegrations at
// the prior bias estimate unless given initial values).
struct BuiltGraph {
  FactorGraph graph;
  Values initial;
  std::vector<double> epoch_times;
};
BuiltGraph build_graph(const SensorStreams& streams,
                       const EstimatorOptions& opts);

// Causal sliding-window MAP: states older than the window are marginalized
// into a dense prior on the window head. The estimate recorded for epoch k
// uses only measurements with t <= t_k.
class FixedLagSmoother {
 public:
  FixedLagSmoother(const GraphSetup& setup, const EstimatorOptions& opts);

  // Epochs must arrive in time order with their preintegrated interval.
  void add_epoch(const EpochData& epoch,
                 std::shared_ptr<PreintegratedImu> pim);

  const Values& values() const { return values_; }
  // Causal per-epoch estimates, recorded right after each insertion.
  const std::vector<NavState>& online_states() const { return online_states_; }
  const std::vector<Vec6>& online_bias() const { return online_bias_; }
  const Vec6& online_lever() const { return values_.lever; }
  const SolveStats& last_stats() const { return stats_; }
  std::string diagnostics() const { return notes_; }

 private:
  void marginalize_before(int head_epoch);

  EstimatorOptions opts_;
  FactorGraph graph_;   // window factors only
  Values values_;       // all epochs; only window entries are optimized
  std::vector<double> epoch_times_;
  int window_start_ = 0;
  std::vector<NavState> online_states_;
  std::vector<Vec6> online_bias_;
  SolveStats stats_;
  std::string notes_;
  NavState prior_state_;
  Vec6 prior_bias_ = Vec6::Zero();
  Vec9 prior_state_sigmas_ = Vec9::Ones();
  Vec6 prior_bias_sigmas_ = Vec6::Ones();
  Vec6 prior_lever_sigmas_ = Vec6::Ones();
};

struct EstimationResult {
  std::vector<double> epoch_times;
  Values online;
  Values batch;
  SolveStats batch_stats;
  double online_cost_full_graph = 0.0;  // online solution on the batch graph
  double batch_cost = 0.0;
  Vec6 lever_marginal_std = Vec6::Zero();
  Vec6 bias_marginal_std = Vec6::Zero();
  std::string diagnostics;
};

// Full pipeline mirroring the three-task layout: the fixed-lag pass feeds
// the batch Levenberg-Marquardt solve, which is initialized from the
// online solution.
EstimationResult run_estimation(const SensorStreams& streams,
                                const EstimatorOptions& opts);

// Forward-integrates the stored IMU measurements from each batch epoch,
// resetting at every epoch; yields poses at the IMU rate.
struct TimedPose {
  double t = 0.0;
  Pose3 pose;
};
std::vector<TimedPose> predict_intermediate(const Values& batch,
                                            const std::vector<double>& epoch_times,
                                            const std::vector<ImuMeasurement>& imu,
                                            const Vec3& gravity);

// T_IS = T_IB * T_BS per sample.
std::vector<TimedPose> sensor_poses(const std::vector<TimedPose>& body,
                                    const Pose3& extrinsic);

// DJI+RTK ablation chain: measured position and attitude streams are
// interpolated at the query times and composed with the rigid chain
// T_DB * T_BS. Throws NumericalError outside the stream span.
std::vector<TimedPose> dji_rtk_compose(
    const std::vector<std::pair<double, Rot3>>& attitude,
    const std::vector<std::pair<double, Vec3>>& position,
    const Pose3& t_db, const Pose3& t_bs,
    const std::vector<double>& query_times);

}  // namespace gpsar::est
