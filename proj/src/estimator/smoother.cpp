#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "gpsar/estimator/smoother.hpp"

namespace gpsar::est {

namespace {

bool var_less(const VarRef& a, const VarRef& b) {
  if (a.kind != b.kind) return a.kind < b.kind;
  return a.epoch < b.epoch;
}

bool var_equal(const VarRef& a, const VarRef& b) {
  return a.kind == b.kind && (a.kind == VarRef::kLever || a.epoch == b.epoch);
}

}  // namespace

FixedLagSmoother::FixedLagSmoother(const GraphSetup& setup,
                                   const EstimatorOptions& opts)
    : opts_(opts) {
  values_.lever = opts.lever_prior;
  prior_state_ = setup.prior_state;
  prior_bias_ = setup.prior_bias;
  prior_state_sigmas_ = setup.prior_state_sigmas;
  prior_bias_sigmas_ = setup.prior_bias_sigmas;
  prior_lever_sigmas_ = setup.prior_lever_sigmas;
}

void FixedLagSmoother::add_epoch(const EpochData& epoch,
                                 std::shared_ptr<PreintegratedImu> pim) {
  const int k = static_cast<int>(epoch_times_.size());
  epoch_times_.push_back(epoch.t);

  if (k == 0) {
    NavState x0 = prior_state_;
    x0.t = epoch.t;
    values_.states.push_back(x0);
    values_.bias.push_back(prior_bias_);
    graph_.factors.push_back(std::make_shared<StatePriorFactor>(
        0, prior_state_, prior_state_sigmas_));
    graph_.factors.push_back(std::make_shared<BiasPriorFactor>(
        0, prior_bias_, prior_bias_sigmas_));
    graph_.factors.push_back(std::make_shared<LeverPriorFactor>(
        values_.lever, prior_lever_sigmas_));
  } else {
    if (pim == nullptr) {
      throw ConfigError("non-initial epoch needs a preintegrated interval");
    }
    // Propagate the previous estimate through the interval as the guess.
    const NavState& prev = values_.states[k - 1];
    NavState x;
    x.t = epoch.t;
    const double dt = pim->delta_t();
    const Vec3 g = opts_.noise.gravity_vec();
    x.rotation = prev.rotation * pim->delta_r();
    x.velocity = prev.velocity + g * dt + prev.rotation * pim->delta_v();
    x.position = prev.position + prev.velocity * dt + 0.5 * g * dt * dt +
                 prev.rotation * pim->delta_p();
    values_.states.push_back(x);
    values_.bias.push_back(values_.bias[k - 1]);

    graph_.factors.push_back(std::make_shared<ImuFactor>(
        k - 1, k, std::move(pim), opts_.noise.gravity_vec()));
    graph_.factors.push_back(std::make_shared<BiasWalkFactor>(
        k - 1, k, opts_.noise.sigma_ba, opts_.noise.sigma_bg,
        epoch.t - epoch_times_[k - 1]));
  }

  if (epoch.position) {
    graph_.factors.push_back(
        std::make_shared<PositionFactor>(k, *epoch.position));
  }
  if (epoch.baseline && opts_.use_moving_baseline) {
    graph_.factors.push_back(
        std::make_shared<MovingBaselineFactor>(k, *epoch.baseline));
  }

  std::vector<int> window_epochs;
  for (int i = window_start_; i <= k; ++i) window_epochs.push_back(i);
  Ordering ordering(window_epochs);
  stats_ = gauss_newton(graph_, ordering, &values_, opts_.gn);
  if (!stats_.note.empty()) notes_ += stats_.note;

  online_states_.push_back(values_.states[k]);
  online_bias_.push_back(values_.bias[k]);

  // Slide the window: first epoch kept is the oldest within the lag.
  if (std::isfinite(opts_.window)) {
    int head = window_start_;
    while (head < k && epoch_times_[head] < epoch.t - opts_.window) ++head;
    if (head > window_start_) marginalize_before(head);
  }
}

void FixedLagSmoother::marginalize_before(int head_epoch) {
  // Factors touching any epoch below the head get absorbed into a dense
  // Gaussian prior on the variables they share with the window.
  std::vector<FactorPtr> affected, kept;
  auto touches_dropped = [&](const FactorPtr& f) {
    for (const auto& v : f->vars()) {
      if (v.kind != VarRef::kLever && v.epoch < head_epoch) return true;
    }
    return false;
  };
  for (auto& f : graph_.factors) {
    (touches_dropped(f) ? affected : kept).push_back(f);
  }
  if (affected.empty()) {
    window_start_ = head_epoch;
    return;
  }

  // Local ordering: dropped variables first, then boundary variables.
  std::vector<VarRef> dropped, boundary;
  auto add_unique = [](std::vector<VarRef>& list, const VarRef& v) {
    for (const auto& e : list) {
      if (var_equal(e, v)) return;
    }
    list.push_back(v);
  };
  for (const auto& f : affected) {
    for (const auto& v : f->vars()) {
      if (v.kind != VarRef::kLever && v.epoch < head_epoch) {
        add_unique(dropped, v);
      } else {
        add_unique(boundary, v);
      }
    }
  }
  std::sort(dropped.begin(), dropped.end(), var_less);
  std::sort(boundary.begin(), boundary.end(), var_less);

  int nd = 0, nb = 0;
  std::vector<int> offsets;
  std::vector<VarRef> all_vars;
  for (const auto& v : dropped) {
    all_vars.push_back(v);
    offsets.push_back(nd);
    nd += v.dim();
  }
  for (const auto& v : boundary) {
    all_vars.push_back(v);
    offsets.push_back(nd + nb);
    nb += v.dim();
  }
  auto local_offset = [&](const VarRef& v) {
    for (size_t i = 0; i < all_vars.size(); ++i) {
      if (var_equal(all_vars[i], v)) return offsets[i];
    }
    throw NumericalError("marginalization bookkeeping error");
  };

  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(nd + nb, nd + nb);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(nd + nb);
  for (const auto& f : affected) {
    const Linearized lin = f->linearize(values_);
    const auto& vars = f->vars();
    for (size_t a = 0; a < vars.size(); ++a) {
      const int oa = local_offset(vars[a]);
      g.segment(oa, vars[a].dim()) +=
          lin.jacobians[a].transpose() * lin.residual;
      for (size_t b = 0; b < vars.size(); ++b) {
        const int ob = local_offset(vars[b]);
        h.block(oa, ob, vars[a].dim(), vars[b].dim()) +=
            lin.jacobians[a].transpose() * lin.jacobians[b];
      }
    }
  }

  // Schur complement onto the boundary.
  Eigen::MatrixXd hdd = h.topLeftCorner(nd, nd);
  hdd.diagonal().array() += 1e-10;  // dropped states are always constrained
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(hdd);
  const Eigen::MatrixXd hdb = h.topRightCorner(nd, nb);
  const Eigen::MatrixXd hbb = h.bottomRightCorner(nb, nb);
  const Eigen::MatrixXd hdd_inv_hdb = ldlt.solve(hdb);
  const Eigen::MatrixXd h_marg = hbb - hdb.transpose() * hdd_inv_hdb;
  const Eigen::VectorXd g_marg =
      g.tail(nb) - hdb.transpose() * ldlt.solve(g.head(nd));

  graph_.factors = std::move(kept);
  graph_.factors.push_back(std::make_shared<MarginalPriorFactor>(
      boundary, values_, h_marg, g_marg));
  window_start_ = head_epoch;
}

EstimationResult run_estimation(const SensorStreams& streams,
                                const EstimatorOptions& opts) {
  const GraphSetup setup = prepare_graph(streams, opts);
  const int n = static_cast<int>(setup.epochs.size());

  // Online pass.
  FixedLagSmoother smoother(setup, opts);
  for (int i = 0; i < n; ++i) {
    std::shared_ptr<PreintegratedImu> pim;
    if (i > 0) {
      const auto [a, b] = setup.imu_spans[i - 1];
      const Vec6& bias = smoother.values().bias[i - 1];
      pim = std::make_shared<PreintegratedImu>(
          std::vector<ImuMeasurement>(streams.imu.begin() + a,
                                      streams.imu.begin() + b + 1),
          bias.head<3>(), bias.tail<3>(), opts.noise.sigma_a,
          opts.noise.sigma_g);
    }
    smoother.add_epoch(setup.epochs[i], std::move(pim));
  }

  EstimationResult result;
  for (const auto& e : setup.epochs) result.epoch_times.push_back(e.t);
  result.online.states = smoother.online_states();
  result.online.bias = smoother.online_bias();
  result.online.lever = smoother.online_lever();
  result.diagnostics = smoother.diagnostics();

  if (!opts.run_batch) {
    result.batch = result.online;
    return result;
  }

  // Batch pass on the full graph, initialized from the online solution.
  BuiltGraph built = build_graph(streams, opts);
  Values batch_values = result.online;
  for (int i = 0; i < n; ++i) batch_values.states[i].t = built.epoch_times[i];

  std::vector<int> all_epochs(n);
  for (int i = 0; i < n; ++i) all_epochs[i] = i;
  Ordering ordering(all_epochs);

  built.graph.refresh_preintegrations(batch_values,
                                      opts.lm.bias_reintegration_threshold);
  result.online_cost_full_graph = built.graph.cost(batch_values);
  result.batch_stats =
      levenberg_marquardt(built.graph, ordering, &batch_values, opts.lm);
  result.batch = batch_values;
  result.batch_cost = result.batch_stats.final_cost;
  result.diagnostics += result.batch_stats.note;

  // Marginal standard deviations of the calibration variables.
  const std::vector<VarRef> calib_vars{{VarRef::kBias, n - 1},
                                       {VarRef::kLever, 0}};
  const Eigen::MatrixXd cov = marginal_covariance(built.graph, ordering,
                                                  batch_values, calib_vars);
  result.bias_marginal_std = cov.diagonal().head<6>().cwiseSqrt();
  result.lever_marginal_std = cov.diagonal().tail<6>().cwiseSqrt();
  return result;
}

std::vector<TimedPose> predict_intermediate(
    const Values& batch, const std::vector<double>& epoch_times,
    const std::vector<ImuMeasurement>& imu, const Vec3& gravity) {
  std::vector<TimedPose> out;
  if (batch.states.empty()) return out;
  out.reserve(imu.size() + 1);

  auto index_at = [&](double t) {
    auto it = std::lower_bound(
        imu.begin(), imu.end(), t - 1e-9,
        [](const ImuMeasurement& m, double tt) { return m.t < tt; });
    return static_cast<int>(it - imu.begin());
  };

  const int n = static_cast<int>(epoch_times.size());
  for (int i = 0; i + 1 < n; ++i) {
    const int a = index_at(epoch_times[i]);
    const int b = index_at(epoch_times[i + 1]);
    Rot3 r = batch.states[i].rotation;
    Vec3 v = batch.states[i].velocity;
    Vec3 p = batch.states[i].position;
    const Vec3 ba = batch.bias[i].head<3>();
    const Vec3 bg = batch.bias[i].tail<3>();
    for (int k = a; k < b; ++k) {
      out.push_back({imu[k].t, Pose3(r, p)});
      ImuStepInput step{imu[k].accel - ba, imu[k + 1].accel - ba,
                        imu[k].gyro - bg, imu[k + 1].gyro - bg,
                        imu[k + 1].t - imu[k].t};
      imu_forward_step(step, gravity, &r, &v, &p);
    }
  }
  const NavState& last = batch.states.back();
  out.push_back({epoch_times.back(), Pose3(last.rotation, last.position)});
  return out;
}

std::vector<TimedPose> sensor_poses(const std::vector<TimedPose>& body,
                                    const Pose3& extrinsic) {
  std::vector<TimedPose> out;
  out.reserve(body.size());
  for (const auto& s : body) {
    out.push_back({s.t, s.pose * extrinsic});
  }
  return out;
}

std::vector<TimedPose> dji_rtk_compose(
    const std::vector<std::pair<double, Rot3>>& attitude,
    const std::vector<std::pair<double, Vec3>>& position,
    const Pose3& t_db, const Pose3& t_bs,
    const std::vector<double>& query_times) {
  if (attitude.size() < 1 || position.size() < 1) {
    throw ConfigError("dji_rtk_compose needs non-empty streams");
  }
  auto check_span = [](double t, double lo, double hi) {
    if (t < lo - 1e-9 || t > hi + 1e-9) {
      throw ConfigError("pose query outside measured stream span");
    }
  };

  std::vector<TimedPose> out;
  out.reserve(query_times.size());
  const Pose3 chain = t_db * t_bs;
  for (double t : query_times) {
    check_span(t, attitude.front().first, attitude.back().first);
    check_span(t, position.front().first, position.back().first);

    auto att_it = std::lower_bound(
        attitude.begin(), attitude.end(), t,
        [](const auto& s, double tt) { return s.first < tt; });
    Rot3 r;
    if (att_it == attitude.begin()) {
      r = att_it->second;
    } else if (att_it == attitude.end()) {
      r = attitude.back().second;
    } else {
      const auto& hi = *att_it;
      const auto& lo = *(att_it - 1);
      const double alpha = (t - lo.first) /
                           std::max(hi.first - lo.first, 1e-12);
      r = lo.second.slerp(hi.second, alpha);
    }

    auto pos_it = std::lower_bound(
        position.begin(), position.end(), t,
        [](const auto& s, double tt) { return s.first < tt; });
    Vec3 p;
    if (pos_it == position.begin()) {
      p = pos_it->second;
    } else if (pos_it == position.end()) {
      p = position.back().second;
    } else {
      const auto& hi = *pos_it;
      const auto& lo = *(pos_it - 1);
      const double alpha = (t - lo.first) /
                           std::max(hi.first - lo.first, 1e-12);
      p = (1.0 - alpha) * lo.second + alpha * hi.second;
    }

    out.push_back({t, Pose3(r, p) * chain});
  }
  return out;
}

}  // namespace gpsar::est
