#include "gpsar/trajectory/polynomial.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace gpsar::traj {

namespace {

// Endpoint-derivative basis for one polynomial family on normalized time
// u in [0,1]: maps the stacked scaled endpoint derivatives to coefficients
// and carries the Gram matrix of the optimized derivative.
struct PolyBasis {
  int ncoeff;
  int nord;
  Eigen::MatrixXd a_inv;  // ncoeff x ncoeff
  Eigen::MatrixXd gram;   // ncoeff x ncoeff, integral of (d^nord P)^2

  PolyBasis(int ncoeff_in, int nord_in) : ncoeff(ncoeff_in), nord(nord_in) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(ncoeff, ncoeff);
    for (int o = 0; o < nord; ++o) {
      // d^o u^k at u=0: k!/(k-o)! for k == o
      double fact = 1.0;
      for (int i = 0; i < o; ++i) fact *= (o - i);
      a(o, o) = fact;
      // at u=1: k!/(k-o)!
      for (int k = o; k < ncoeff; ++k) {
        double c = 1.0;
        for (int i = 0; i < o; ++i) c *= (k - i);
        a(nord + o, k) = c;
      }
    }
    a_inv = a.inverse();

    const int m = nord;  // optimized derivative order
    gram = Eigen::MatrixXd::Zero(ncoeff, ncoeff);
    for (int i = m; i < ncoeff; ++i) {
      for (int j = m; j < ncoeff; ++j) {
        double ci = 1.0, cj = 1.0;
        for (int k = 0; k < m; ++k) {
          ci *= (i - k);
          cj *= (j - k);
        }
        gram(i, j) = ci * cj / (i + j - 2 * m + 1);
      }
    }
  }
};

const PolyBasis& pos_basis() {
  static const PolyBasis basis(kPosCoeffs, kPosOrders);
  return basis;
}

const PolyBasis& yaw_basis() {
  static const PolyBasis basis(kYawCoeffs, kYawOrders);
  return basis;
}

// Scales normalized-time coefficients back to local segment time.
template <typename Derived>
void denormalize(Eigen::MatrixBase<Derived>& coeffs, double duration) {
  double scale = 1.0;
  for (int k = 0; k < coeffs.rows(); ++k) {
    coeffs.row(k) *= scale;
    scale /= duration;
  }
}

// Solves one scalar axis over a vertex chain: quadratic in the free
// endpoint derivatives, equality-pinned elsewhere.
Eigen::MatrixXd solve_axis(const PolyBasis& basis,
                           const std::vector<std::array<std::optional<double>,
                                                        kPosOrders>>& derivs,
                           const std::vector<double>& times) {
  const int nv = static_cast<int>(derivs.size());
  const int ns = nv - 1;
  const int nord = basis.nord;
  const int nvar = nv * nord;

  std::vector<bool> fixed(nvar, false);
  Eigen::VectorXd value = Eigen::VectorXd::Zero(nvar);
  for (int k = 0; k < nv; ++k) {
    for (int o = 0; o < nord; ++o) {
      if (derivs[k][o].has_value()) {
        fixed[k * nord + o] = true;
        value[k * nord + o] = *derivs[k][o];
      }
    }
  }

  const bool any_free = std::any_of(fixed.begin(), fixed.end(),
                                    [](bool f) { return !f; });
  if (any_free) {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(nvar, nvar);
    for (int s = 0; s < ns; ++s) {
      const double t = times[s];
      // Cost of segment s in terms of scaled endpoint derivatives, mapped
      // to unscaled vertex derivatives: S^T A^-T Q A^-1 S / T^(2m-1).
      Eigen::VectorXd scale(2 * nord);
      for (int o = 0; o < nord; ++o) {
        scale[o] = std::pow(t, o);
        scale[nord + o] = scale[o];
      }
      Eigen::MatrixXd m = basis.a_inv.transpose() * basis.gram * basis.a_inv;
      m /= std::pow(t, 2 * basis.nord - 1);
      m = scale.asDiagonal() * m * scale.asDiagonal();
      for (int i = 0; i < 2 * nord; ++i) {
        const int gi = s * nord + i;
        for (int j = 0; j < 2 * nord; ++j) {
          h(gi, s * nord + j) += m(i, j);
        }
      }
    }

    std::vector<int> free_idx;
    for (int i = 0; i < nvar; ++i) {
      if (!fixed[i]) free_idx.push_back(i);
    }
    const int nf = static_cast<int>(free_idx.size());
    Eigen::MatrixXd hff(nf, nf);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nf);
    for (int i = 0; i < nf; ++i) {
      for (int j = 0; j < nf; ++j) hff(i, j) = h(free_idx[i], free_idx[j]);
      for (int p = 0; p < nvar; ++p) {
        if (fixed[p]) rhs[i] -= h(free_idx[i], p) * value[p];
      }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(hff);
    if (!lu.isInvertible()) {
      throw NumericalError("polynomial constraint system is rank-deficient");
    }
    const Eigen::VectorXd xf = lu.solve(rhs);
    for (int i = 0; i < nf; ++i) value[free_idx[i]] = xf[i];
  }

  // Coefficients per segment from the endpoint derivatives.
  Eigen::MatrixXd coeffs(basis.ncoeff, ns);
  for (int s = 0; s < ns; ++s) {
    const double t = times[s];
    Eigen::VectorXd d(2 * nord);
    for (int o = 0; o < nord; ++o) {
      d[o] = value[s * nord + o] * std::pow(t, o);
      d[nord + o] = value[(s + 1) * nord + o] * std::pow(t, o);
    }
    coeffs.col(s) = basis.a_inv * d;
  }
  return coeffs;
}

void eval_poly(const double* c, int n, double t, double* out, int nderiv) {
  for (int d = 0; d <= nderiv; ++d) {
    double acc = 0.0;
    for (int k = n - 1; k >= d; --k) {
      double fact = 1.0;
      for (int i = 0; i < d; ++i) fact *= (k - i);
      acc = acc * t + fact * c[k];
    }
    out[d] = acc;
  }
}

}  // namespace

std::string to_string(SegmentKind kind) {
  switch (kind) {
    case SegmentKind::kMeasurement: return "measurement";
    case SegmentKind::kAccelerate: return "accelerate";
    case SegmentKind::kDecelerate: return "decelerate";
    case SegmentKind::kTransfer: return "transfer";
  }
  return "unknown";
}

double Trajectory::duration() const {
  double total = 0.0;
  for (const auto& s : segments) total += s.duration;
  return total;
}

FlatState sample_segment(const PolySegment& seg, double t) {
  FlatState out;
  double vals[4];
  for (int axis = 0; axis < 3; ++axis) {
    Eigen::Matrix<double, kPosCoeffs, 1> c = seg.pos_coeffs.col(axis);
    eval_poly(c.data(), kPosCoeffs, t, vals, 3);
    out.position[axis] = vals[0];
    out.velocity[axis] = vals[1];
    out.acceleration[axis] = vals[2];
    out.jerk[axis] = vals[3];
  }
  eval_poly(seg.yaw_coeffs.data(), kYawCoeffs, t, vals, 2);
  out.yaw = vals[0];
  out.yaw_rate = vals[1];
  out.yaw_accel = vals[2];
  return out;
}

FlatState Trajectory::sample(double t) const {
  const double eps = 1e-9;
  double local = t - start_time;
  if (segments.empty() || local < -eps || local > duration() + eps) {
    throw std::out_of_range("sample time outside trajectory span");
  }
  local = std::max(local, 0.0);
  for (size_t i = 0; i < segments.size(); ++i) {
    if (local <= segments[i].duration || i + 1 == segments.size()) {
      return sample_segment(segments[i],
                            std::min(local, segments[i].duration));
    }
    local -= segments[i].duration;
  }
  return sample_segment(segments.back(), segments.back().duration);
}

FeasibilityReport feasibility_check(const PolySegment& seg,
                                    const DynamicLimits& limits) {
  FeasibilityReport report;
  const double step = 1e-3;
  const Vec3 g = gravity_vector();
  const int n = static_cast<int>(std::ceil(seg.duration / step));
  for (int i = 0; i <= n; ++i) {
    const double t = std::min(i * step, seg.duration);
    const FlatState s = sample_segment(seg, t);
    const double thrust = (s.acceleration - g).norm();
    const double speed = s.velocity.norm();
    const double tilt_rate = s.jerk.norm() / std::max(thrust, 1e-6);
    auto fail = [&](const char* what, double value, double limit) {
      report.feasible = false;
      report.violation = what;
      report.time = t;
      report.value = value;
      report.limit = limit;
    };
    if (thrust > limits.f_max) {
      fail("thrust_max", thrust, limits.f_max);
    } else if (thrust < limits.f_min) {
      fail("thrust_min", thrust, limits.f_min);
    } else if (speed > limits.v_max) {
      fail("speed", speed, limits.v_max);
    } else if (tilt_rate > limits.tilt_rate_max) {
      fail("tilt_rate", tilt_rate, limits.tilt_rate_max);
    } else if (std::abs(s.yaw_accel) > limits.yaw_acc_max) {
      fail("yaw_accel", std::abs(s.yaw_accel), limits.yaw_acc_max);
    }
    if (!report.feasible) return report;
  }
  return report;
}

Trajectory solve_polynomial(const std::vector<VertexConstraint>& vertices,
                            const std::vector<double>& segment_times,
                            SegmentKind kind) {
  if (vertices.size() < 2) {
    throw NumericalError("polynomial needs at least two vertices");
  }
  if (segment_times.size() + 1 != vertices.size()) {
    throw NumericalError("segment time count must be vertex count - 1");
  }
  for (double t : segment_times) {
    if (!(t > 0.0)) throw NumericalError("segment times must be positive");
  }

  const int nv = static_cast<int>(vertices.size());
  const int ns = nv - 1;

  // Per-axis derivative tables, orders 0..4.
  using AxisDerivs =
      std::vector<std::array<std::optional<double>, kPosOrders>>;
  std::array<AxisDerivs, 3> derivs;
  for (int axis = 0; axis < 3; ++axis) {
    derivs[axis].resize(nv);
    for (int k = 0; k < nv; ++k) {
      const auto& v = vertices[k];
      derivs[axis][k][0] = v.position[axis];
      if (v.velocity) derivs[axis][k][1] = (*v.velocity)[axis];
      if (v.acceleration) derivs[axis][k][2] = (*v.acceleration)[axis];
      if (v.jerk) derivs[axis][k][3] = (*v.jerk)[axis];
      if (v.snap) derivs[axis][k][4] = (*v.snap)[axis];
    }
  }

  std::array<Eigen::MatrixXd, 3> axis_coeffs;
  for (int axis = 0; axis < 3; ++axis) {
    axis_coeffs[axis] = solve_axis(pos_basis(), derivs[axis], segment_times);
  }

  // Yaw: unwrap the fixed angles into a continuous sequence first.
  AxisDerivs yaw_derivs(nv);
  double prev_yaw = 0.0;
  bool have_prev = false;
  for (int k = 0; k < nv; ++k) {
    const auto& v = vertices[k];
    if (v.yaw) {
      double yaw = *v.yaw;
      if (have_prev) {
        while (yaw - prev_yaw > M_PI) yaw -= 2.0 * M_PI;
        while (yaw - prev_yaw < -M_PI) yaw += 2.0 * M_PI;
      }
      yaw_derivs[k][0] = yaw;
      prev_yaw = yaw;
      have_prev = true;
    }
    if (v.yaw_rate) yaw_derivs[k][1] = *v.yaw_rate;
    yaw_derivs[k][2] = 0.0;
  }
  // An entirely yaw-free chain still needs an anchor.
  if (!have_prev) yaw_derivs[0][0] = 0.0;
  Eigen::MatrixXd yaw_coeffs = solve_axis(yaw_basis(), yaw_derivs,
                                          segment_times);

  Trajectory traj;
  traj.segments.resize(ns);
  for (int s = 0; s < ns; ++s) {
    PolySegment& seg = traj.segments[s];
    for (int axis = 0; axis < 3; ++axis) {
      seg.pos_coeffs.col(axis) = axis_coeffs[axis].col(s);
    }
    seg.yaw_coeffs = yaw_coeffs.col(s);
    seg.duration = segment_times[s];
    // solve_axis works on normalized time; map t^k coefficients back.
    denormalize(seg.pos_coeffs, seg.duration);
    denormalize(seg.yaw_coeffs, seg.duration);
    seg.kind = kind;
  }
  return traj;
}

PolySegment min_time_connection(const VertexConstraint& from,
                                const VertexConstraint& to,
                                const DynamicLimits& limits,
                                const MinTimeOptions& opts) {
  auto pinned = [](VertexConstraint v) {
    if (!v.velocity) v.velocity = Vec3::Zero();
    if (!v.acceleration) v.acceleration = Vec3::Zero();
    if (!v.jerk) v.jerk = Vec3::Zero();
    if (!v.snap) v.snap = Vec3::Zero();
    if (!v.yaw) v.yaw = 0.0;
    if (!v.yaw_rate) v.yaw_rate = 0.0;
    return v;
  };
  std::vector<VertexConstraint> verts{pinned(from), pinned(to)};

  auto build = [&](double t) {
    return solve_polynomial(verts, {t}, SegmentKind::kTransfer).segments[0];
  };

  PolySegment seg = build(opts.min_duration);
  if (feasibility_check(seg, limits).feasible) return seg;

  double lo = opts.min_duration;
  double hi = lo;
  while (true) {
    hi *= 2.0;
    if (hi > opts.max_duration) {
      throw NumericalError("no feasible connection time below cap");
    }
    seg = build(hi);
    if (feasibility_check(seg, limits).feasible) break;
    lo = hi;
  }
  while (hi - lo > opts.tolerance) {
    const double mid = 0.5 * (lo + hi);
    PolySegment trial = build(mid);
    if (feasibility_check(trial, limits).feasible) {
      hi = mid;
      seg = trial;
    } else {
      lo = mid;
    }
  }
  return seg;
}

std::vector<std::pair<double, double>> mission_mask(const Trajectory& traj) {
  std::vector<std::pair<double, double>> windows;
  double t = traj.start_time;
  for (const auto& seg : traj.segments) {
    if (seg.kind == SegmentKind::kMeasurement) {
      if (!windows.empty() && std::abs(windows.back().second - t) < 1e-12) {
        windows.back().second = t + seg.duration;
      } else {
        windows.emplace_back(t, t + seg.duration);
      }
    }
    t += seg.duration;
  }
  return windows;
}

}  // namespace gpsar::traj
