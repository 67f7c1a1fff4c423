#include <Eigen/Cholesky>

#include "gpsar/estimator/graph.hpp"

namespace gpsar::est {

Mat3 sqrt_information(const Mat3& cov) {
  const Mat3 info = cov.inverse();
  Eigen::LLT<Mat3> llt(info);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("measurement covariance is not SPD");
  }
  return Mat3(llt.matrixL().transpose());
}

// ---- position -------------------------------------------------------------

PositionFactor::PositionFactor(int epoch, const GnssPosition& z)
    : vars_{{VarRef::kState, epoch}, {VarRef::kLever, 0}},
      z_(z),
      sqrt_info_(sqrt_information(z.cov)) {}

Linearized PositionFactor::linearize(const Values& values) const {
  const NavState& x = values.states[vars_[0].epoch];
  const Vec3 lever_pos = values.lever.head<3>();
  const Mat3 r = x.rotation.matrix();

  Linearized out;
  out.residual = sqrt_info_ * (x.position + r * lever_pos - z_.position);

  Eigen::MatrixXd jx = Eigen::MatrixXd::Zero(3, 9);
  jx.block<3, 3>(0, 0) = -r * skew(lever_pos);  // d/dtheta
  jx.block<3, 3>(0, 3) = Mat3::Identity();      // d/dp
  Eigen::MatrixXd jl = Eigen::MatrixXd::Zero(3, 6);
  jl.block<3, 3>(0, 0) = r;  // d/dr_BP
  out.jacobians = {sqrt_info_ * jx, sqrt_info_ * jl};
  return out;
}

// ---- moving baseline -------------------------------------------------------

MovingBaselineFactor::MovingBaselineFactor(int epoch, const MovingBaseline& z)
    : vars_{{VarRef::kState, epoch}, {VarRef::kLever, 0}},
      z_(z),
      sqrt_info_(sqrt_information(z.cov)) {}

Linearized MovingBaselineFactor::linearize(const Values& values) const {
  const NavState& x = values.states[vars_[0].epoch];
  const Vec3 lever_pos = values.lever.head<3>();
  const Vec3 lever_mb = values.lever.tail<3>();
  const Mat3 r = x.rotation.matrix();

  Linearized out;
  out.residual = sqrt_info_ * (r * (lever_mb - lever_pos) - z_.baseline);

  Eigen::MatrixXd jx = Eigen::MatrixXd::Zero(3, 9);
  jx.block<3, 3>(0, 0) = r * skew(lever_pos - lever_mb);
  Eigen::MatrixXd jl = Eigen::MatrixXd::Zero(3, 6);
  jl.block<3, 3>(0, 0) = -r;
  jl.block<3, 3>(0, 3) = r;
  out.jacobians = {sqrt_info_ * jx, sqrt_info_ * jl};
  return out;
}

// ---- imu -------------------------------------------------------------------

ImuFactor::ImuFactor(int epoch_i, int epoch_j,
                     std::shared_ptr<PreintegratedImu> pim,
                     const Vec3& gravity)
    : vars_{{VarRef::kState, epoch_i},
            {VarRef::kBias, epoch_i},
            {VarRef::kState, epoch_j}},
      pim_(std::move(pim)),
      gravity_(gravity) {}

Linearized ImuFactor::linearize(const Values& values) const {
  const NavState& xi = values.states[vars_[0].epoch];
  const NavState& xj = values.states[vars_[2].epoch];
  const double dt = pim_->delta_t();
  const Mat3 ri_t = xi.rotation.matrix().transpose();

  // Residual in (rotation, velocity, position) order.
  const Rot3 er = pim_->delta_r().inverse() * xi.rotation.inverse() *
                  xj.rotation;
  const Vec3 r_rot = er.log();
  const Vec3 dv_world = xj.velocity - xi.velocity - gravity_ * dt;
  const Vec3 r_vel = ri_t * dv_world - pim_->delta_v();
  const Vec3 dp_world = xj.position - xi.position - xi.velocity * dt -
                        0.5 * gravity_ * dt * dt;
  const Vec3 r_pos = ri_t * dp_world - pim_->delta_p();

  Vec9 residual;
  residual << r_rot, r_vel, r_pos;

  const Mat3 jr_inv = so3_right_jacobian_inverse(r_rot);
  const Mat3 er_mat = er.matrix();

  Eigen::MatrixXd ji = Eigen::MatrixXd::Zero(9, 9);
  ji.block<3, 3>(0, 0) = -jr_inv * (xj.rotation.inverse() * xi.rotation)
                                       .matrix();
  ji.block<3, 3>(3, 0) = skew(ri_t * dv_world);
  ji.block<3, 3>(3, 6) = -ri_t;
  ji.block<3, 3>(6, 0) = skew(ri_t * dp_world);
  ji.block<3, 3>(6, 3) = -ri_t;
  ji.block<3, 3>(6, 6) = -ri_t * dt;

  Eigen::MatrixXd jb = Eigen::MatrixXd::Zero(9, 6);
  jb.block<3, 3>(0, 3) = -jr_inv * er_mat.transpose() * pim_->dr_dbg();
  jb.block<3, 3>(3, 0) = -pim_->dv_dba();
  jb.block<3, 3>(3, 3) = -pim_->dv_dbg();
  jb.block<3, 3>(6, 0) = -pim_->dp_dba();
  jb.block<3, 3>(6, 3) = -pim_->dp_dbg();

  Eigen::MatrixXd jj = Eigen::MatrixXd::Zero(9, 9);
  jj.block<3, 3>(0, 0) = jr_inv;
  jj.block<3, 3>(3, 6) = ri_t;
  jj.block<3, 3>(6, 3) = ri_t;

  // Whiten with the preintegration covariance.
  Eigen::LLT<Mat9> llt(pim_->covariance());
  if (llt.info() != Eigen::Success) {
    throw NumericalError("preintegration covariance is not SPD");
  }
  const Mat9 l = llt.matrixL();
  Linearized out;
  out.residual = l.triangularView<Eigen::Lower>().solve(residual);
  out.jacobians = {l.triangularView<Eigen::Lower>().solve(ji),
                   l.triangularView<Eigen::Lower>().solve(jb),
                   l.triangularView<Eigen::Lower>().solve(jj)};
  return out;
}

// ---- bias random walk -------------------------------------------------------

BiasWalkFactor::BiasWalkFactor(int epoch_i, int epoch_j, double sigma_ba,
                               double sigma_bg, double dt)
    : vars_{{VarRef::kBias, epoch_i}, {VarRef::kBias, epoch_j}} {
  const double sa = sigma_ba * std::sqrt(dt);
  const double sg = sigma_bg * std::sqrt(dt);
  inv_std_ << 1.0 / sa, 1.0 / sa, 1.0 / sa, 1.0 / sg, 1.0 / sg, 1.0 / sg;
}

Linearized BiasWalkFactor::linearize(const Values& values) const {
  const Vec6& bi = values.bias[vars_[0].epoch];
  const Vec6& bj = values.bias[vars_[1].epoch];
  Linearized out;
  out.residual = inv_std_.cwiseProduct(bj - bi);
  Eigen::MatrixXd ji = (-inv_std_).asDiagonal() * Mat6::Identity();
  Eigen::MatrixXd jj = inv_std_.asDiagonal() * Mat6::Identity();
  out.jacobians = {ji, jj};
  return out;
}

// ---- priors -----------------------------------------------------------------

StatePriorFactor::StatePriorFactor(int epoch, const NavState& mean,
                                   const Vec9& sigmas)
    : vars_{{VarRef::kState, epoch}}, mean_(mean),
      inv_std_(sigmas.cwiseInverse()) {}

Linearized StatePriorFactor::linearize(const Values& values) const {
  const NavState& x = values.states[vars_[0].epoch];
  const Vec3 r_rot = (mean_.rotation.inverse() * x.rotation).log();

  Vec9 residual;
  residual << r_rot, x.position - mean_.position, x.velocity - mean_.velocity;
  Linearized out;
  out.residual = inv_std_.cwiseProduct(residual);

  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(9, 9);
  j.block<3, 3>(0, 0) = so3_right_jacobian_inverse(r_rot);
  j.block<3, 3>(3, 3) = Mat3::Identity();
  j.block<3, 3>(6, 6) = Mat3::Identity();
  out.jacobians = {inv_std_.asDiagonal() * j};
  return out;
}

BiasPriorFactor::BiasPriorFactor(int epoch, const Vec6& mean,
                                 const Vec6& sigmas)
    : vars_{{VarRef::kBias, epoch}}, mean_(mean),
      inv_std_(sigmas.cwiseInverse()) {}

Linearized BiasPriorFactor::linearize(const Values& values) const {
  Linearized out;
  out.residual = inv_std_.cwiseProduct(values.bias[vars_[0].epoch] - mean_);
  out.jacobians = {Eigen::MatrixXd(inv_std_.asDiagonal() *
                                   Mat6::Identity())};
  return out;
}

LeverPriorFactor::LeverPriorFactor(const Vec6& mean, const Vec6& sigmas)
    : vars_{{VarRef::kLever, 0}}, mean_(mean),
      inv_std_(sigmas.cwiseInverse()) {}

Linearized LeverPriorFactor::linearize(const Values& values) const {
  Linearized out;
  out.residual = inv_std_.cwiseProduct(values.lever - mean_);
  out.jacobians = {Eigen::MatrixXd(inv_std_.asDiagonal() *
                                   Mat6::Identity())};
  return out;
}

// ---- marginal prior ----------------------------------------------------------

MarginalPriorFactor::MarginalPriorFactor(std::vector<VarRef> vars,
                                         Values linearization,
                                         const Eigen::MatrixXd& hessian,
                                         const Eigen::VectorXd& gradient)
    : vars_(std::move(vars)), lin_(std::move(linearization)) {
  dim_ = 0;
  for (const auto& v : vars_) dim_ += v.dim();

  // H = L L^T; residual = L^T delta + L^-1 g reproduces the quadratic up
  // to a constant. A small jitter keeps rank-deficient marginals usable.
  Eigen::MatrixXd h = hessian;
  Eigen::LLT<Eigen::MatrixXd> llt(h);
  double jitter = 1e-12;
  while (llt.info() != Eigen::Success && jitter < 1e-3) {
    h = hessian + jitter * Eigen::MatrixXd::Identity(dim_, dim_);
    llt.compute(h);
    jitter *= 10.0;
  }
  if (llt.info() != Eigen::Success) {
    throw NumericalError("marginal prior hessian not factorizable");
  }
  const Eigen::MatrixXd l = llt.matrixL();
  sqrt_info_ = l.transpose();
  offset_ = l.triangularView<Eigen::Lower>().solve(gradient);
}

Linearized MarginalPriorFactor::linearize(const Values& values) const {
  Eigen::VectorXd delta(dim_);
  Eigen::MatrixXd chain = Eigen::MatrixXd::Zero(dim_, dim_);
  int row = 0;
  for (const auto& v : vars_) {
    if (v.kind == VarRef::kState) {
      const NavState& x = values.states[v.epoch];
      const NavState& x0 = lin_.states[v.epoch];
      const Vec3 dtheta = (x0.rotation.inverse() * x.rotation).log();
      delta.segment<3>(row) = dtheta;
      delta.segment<3>(row + 3) = x.position - x0.position;
      delta.segment<3>(row + 6) = x.velocity - x0.velocity;
      chain.block<3, 3>(row, row) = so3_right_jacobian_inverse(dtheta);
      chain.block<6, 6>(row + 3, row + 3) = Mat6::Identity();
      row += 9;
    } else if (v.kind == VarRef::kBias) {
      delta.segment<6>(row) = values.bias[v.epoch] - lin_.bias[v.epoch];
      chain.block<6, 6>(row, row) = Mat6::Identity();
      row += 6;
    } else {
      delta.segment<6>(row) = values.lever - lin_.lever;
      chain.block<6, 6>(row, row) = Mat6::Identity();
      row += 6;
    }
  }

  Linearized out;
  out.residual = sqrt_info_ * delta + offset_;
  const Eigen::MatrixXd j = sqrt_info_ * chain;
  out.jacobians.clear();
  int col = 0;
  for (const auto& v : vars_) {
    out.jacobians.push_back(j.middleCols(col, v.dim()));
    col += v.dim();
  }
  return out;
}

// ---- graph -------------------------------------------------------------------

int FactorGraph::refresh_preintegrations(const Values& values,
                                         double threshold) {
  int touched = 0;
  for (auto& f : factors) {
    auto* imu = dynamic_cast<ImuFactor*>(f.get());
    if (imu == nullptr) continue;
    const Vec6& b = values.bias[imu->epoch_i()];
    if (imu->pim().bias_drift(b.head<3>(), b.tail<3>()) > threshold) {
      imu->pim().reintegrate(b.head<3>(), b.tail<3>());
      ++touched;
    }
  }
  return touched;
}

}  // namespace gpsar::est
