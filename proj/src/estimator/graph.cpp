#include <algorithm>

#include "gpsar/estimator/init.hpp"
#include "gpsar/estimator/smoother.hpp"

namespace gpsar::est {

namespace {

constexpr double kEpochMergeTol = 1e-6;

std::vector<ImuMeasurement> slice_samples(
    const std::vector<ImuMeasurement>& imu, int first, int last) {
  return std::vector<ImuMeasurement>(imu.begin() + first,
                                     imu.begin() + last + 1);
}

}  // namespace

GraphSetup prepare_graph(const SensorStreams& streams,
                         const EstimatorOptions& opts) {
  if (streams.gnss_pos.empty()) {
    throw ConfigError("no GNSS position measurements");
  }
  if (streams.imu.size() < 2) {
    throw ConfigError("IMU stream too short");
  }
  for (size_t i = 0; i + 1 < streams.imu.size(); ++i) {
    if (!(streams.imu[i + 1].t > streams.imu[i].t)) {
      throw ConfigError("IMU timestamps not strictly increasing");
    }
  }

  // Gap check against the nominal (median) period.
  std::vector<double> periods;
  periods.reserve(streams.imu.size());
  for (size_t i = 0; i + 1 < streams.imu.size(); ++i) {
    periods.push_back(streams.imu[i + 1].t - streams.imu[i].t);
  }
  std::nth_element(periods.begin(), periods.begin() + periods.size() / 2,
                   periods.end());
  const double nominal = periods[periods.size() / 2];
  for (size_t i = 0; i + 1 < streams.imu.size(); ++i) {
    if (streams.imu[i + 1].t - streams.imu[i].t > 3.0 * nominal) {
      throw ConfigError("IMU stream has a gap larger than 3 periods near t=" +
                        std::to_string(streams.imu[i].t));
    }
  }

  GraphSetup setup;

  // Epochs: union of GNSS measurement times.
  std::vector<EpochData> epochs;
  for (const auto& z : streams.gnss_pos) {
    epochs.push_back({z.t, z, std::nullopt});
  }
  for (const auto& z : streams.gnss_mb) {
    auto it = std::find_if(epochs.begin(), epochs.end(), [&](const EpochData& e) {
      return std::abs(e.t - z.t) < kEpochMergeTol;
    });
    if (it != epochs.end()) {
      it->baseline = z;
    } else {
      epochs.push_back({z.t, std::nullopt, z});
    }
  }
  std::sort(epochs.begin(), epochs.end(),
            [](const EpochData& a, const EpochData& b) { return a.t < b.t; });
  setup.epochs = std::move(epochs);

  // IMU spans per interval, inclusive of both boundary samples.
  const auto& imu = streams.imu;
  auto index_at = [&](double t) {
    auto it = std::lower_bound(
        imu.begin(), imu.end(), t - kEpochMergeTol,
        [](const ImuMeasurement& m, double tt) { return m.t < tt; });
    return static_cast<int>(it - imu.begin());
  };
  const double t0 = setup.epochs.front().t;
  const double t_last = setup.epochs.back().t;
  if (imu.front().t > t0 + kEpochMergeTol ||
      imu.back().t < t_last - kEpochMergeTol) {
    throw ConfigError("IMU stream does not cover the GNSS time span");
  }
  setup.imu_spans.reserve(setup.epochs.size() - 1);
  for (size_t i = 0; i + 1 < setup.epochs.size(); ++i) {
    int a = index_at(setup.epochs[i].t);
    int b = index_at(setup.epochs[i + 1].t);
    if (b >= static_cast<int>(imu.size())) b = static_cast<int>(imu.size()) - 1;
    if (b - a < 1) {
      throw ConfigError("no IMU samples between consecutive GNSS epochs");
    }
    setup.imu_spans.emplace_back(a, b);
  }

  // Standstill initialization from the samples up to the first epoch.
  const int init_end = std::max(index_at(t0), 1);
  std::vector<ImuMeasurement> standstill(imu.begin(), imu.begin() + init_end);
  if (standstill.size() < 100) {
    throw ConfigError("need at least 100 standstill IMU samples before the "
                      "first GNSS epoch");
  }
  Vec3 accel_mean = Vec3::Zero();
  for (const auto& m : standstill) accel_mean += m.accel;
  accel_mean /= static_cast<double>(standstill.size());
  const double sigma_g_discrete = opts.noise.sigma_g / std::sqrt(nominal);
  const Vec3 gyro_bias = gyro_bias_init(standstill, sigma_g_discrete);

  const Vec3 lever_pos_prior = opts.lever_prior.head<3>();
  const Vec3 lever_mb_prior = opts.lever_prior.tail<3>();
  Rot3 r0;
  double yaw_prior_std = opts.noise.prior_yaw_std;
  if (!streams.gnss_mb.empty()) {
    r0 = triad_init(accel_mean, streams.gnss_mb.front().baseline,
                    lever_mb_prior - lever_pos_prior);
  } else {
    // Position-only configuration: gravity alignment, yaw unconstrained.
    const Vec3 g_body = -accel_mean.normalized();
    const Vec3 g_inertial(0.0, 0.0, -1.0);
    const Vec3 axis = g_body.cross(g_inertial);
    const double angle = std::atan2(axis.norm(), g_body.dot(g_inertial));
    r0 = axis.norm() < 1e-12 ? Rot3()
                             : Rot3::exp(angle * axis.normalized());
    yaw_prior_std = M_PI;
  }
  if (opts.heading_offset != 0.0) {
    r0 = Rot3::rot_z(opts.heading_offset) * r0;
  }

  // First position measurement anchors r_IB(0).
  const GnssPosition* first_pos = nullptr;
  for (const auto& e : setup.epochs) {
    if (e.position) {
      first_pos = &*e.position;
      break;
    }
  }
  if (first_pos == nullptr) {
    throw ConfigError("no position measurement to anchor the initial state");
  }

  setup.prior_state.t = t0;
  setup.prior_state.rotation = r0;
  setup.prior_state.position = initial_position(*first_pos, r0,
                                                lever_pos_prior);
  setup.prior_state.velocity = Vec3::Zero();
  setup.prior_bias.head<3>() = Vec3::Zero();
  setup.prior_bias.tail<3>() = gyro_bias;

  const auto& n = opts.noise;
  setup.prior_state_sigmas << n.prior_rot_std, n.prior_rot_std,
      yaw_prior_std, n.prior_pos_std, n.prior_pos_std, n.prior_pos_std,
      n.prior_vel_std, n.prior_vel_std, n.prior_vel_std;
  setup.prior_bias_sigmas << n.prior_ba_std, n.prior_ba_std, n.prior_ba_std,
      n.prior_bg_std, n.prior_bg_std, n.prior_bg_std;
  setup.prior_lever_sigmas = Vec6::Constant(n.prior_lever_std);
  return setup;
}

BuiltGraph build_graph(const SensorStreams& streams,
                       const EstimatorOptions& opts) {
  const GraphSetup setup = prepare_graph(streams, opts);
  const int n = static_cast<int>(setup.epochs.size());

  BuiltGraph built;
  built.epoch_times.reserve(n);
  for (const auto& e : setup.epochs) built.epoch_times.push_back(e.t);

  // Dead-reckoned initial values from the prior.
  Values& values = built.initial;
  values.states.resize(n);
  values.bias.assign(n, setup.prior_bias);
  values.lever = opts.lever_prior;
  values.states[0] = setup.prior_state;

  FactorGraph& graph = built.graph;
  graph.factors.push_back(std::make_shared<StatePriorFactor>(
      0, setup.prior_state, setup.prior_state_sigmas));
  graph.factors.push_back(std::make_shared<BiasPriorFactor>(
      0, setup.prior_bias, setup.prior_bias_sigmas));
  graph.factors.push_back(std::make_shared<LeverPriorFactor>(
      opts.lever_prior, setup.prior_lever_sigmas));

  const Vec3 gravity = opts.noise.gravity_vec();
  for (int i = 0; i < n; ++i) {
    const EpochData& e = setup.epochs[i];
    values.states[i].t = e.t;
    if (e.position) {
      graph.factors.push_back(std::make_shared<PositionFactor>(i, *e.position));
    }
    if (e.baseline && opts.use_moving_baseline) {
      graph.factors.push_back(
          std::make_shared<MovingBaselineFactor>(i, *e.baseline));
    }
    if (i == 0) continue;

    const auto [a, b] = setup.imu_spans[i - 1];
    auto pim = std::make_shared<PreintegratedImu>(
        slice_samples(streams.imu, a, b), setup.prior_bias.head<3>(),
        setup.prior_bias.tail<3>(), opts.noise.sigma_a, opts.noise.sigma_g);
    const double dt = e.t - setup.epochs[i - 1].t;
    graph.factors.push_back(
        std::make_shared<ImuFactor>(i - 1, i, pim, gravity));
    graph.factors.push_back(std::make_shared<BiasWalkFactor>(
        i - 1, i, opts.noise.sigma_ba, opts.noise.sigma_bg, dt));

    // Propagate the initial value forward through the interval.
    NavState x = values.states[i - 1];
    Rot3 r = x.rotation;
    Vec3 v = x.velocity;
    Vec3 p = x.position;
    r = r * pim->delta_r();
    v = x.velocity + gravity * pim->delta_t() +
        x.rotation * pim->delta_v();
    p = x.position + x.velocity * pim->delta_t() +
        0.5 * gravity * pim->delta_t() * pim->delta_t() +
        x.rotation * pim->delta_p();
    values.states[i].rotation = r;
    values.states[i].velocity = v;
    values.states[i].position = p;
  }
  return built;
}

}  // namespace gpsar::est
