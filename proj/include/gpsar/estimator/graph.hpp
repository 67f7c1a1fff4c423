#pragma once

#include <memory>

#include "gpsar/estimator/preintegration.hpp"

namespace gpsar::est {

// Estimate container: one NavState and bias pair per GNSS epoch plus the
// shared lever-arm variable (r_BP, r_BM stacked). The lever arms are
// constant per run, so a single variable links to all epochs.
struct Values {
  std::vector<NavState> states;
  std::vector<Vec6> bias;  // [b_a; b_g] per epoch
  Vec6 lever = Vec6::Zero();

  int num_epochs() const { return static_cast<int>(states.size()); }

  Calibration calibration_at(int epoch) const {
    Calibration c;
    c.accel_bias = bias[epoch].head<3>();
    c.gyro_bias = bias[epoch].tail<3>();
    c.lever_pos = lever.head<3>();
    c.lever_mb = lever.tail<3>();
    return c;
  }
};

// Variable handle: per-epoch state (9: rot, pos, vel), per-epoch bias (6),
// or the shared lever arm (6).
struct VarRef {
  enum Kind { kState, kBias, kLever };
  Kind kind = kState;
  int epoch = 0;

  int dim() const { return kind == kState ? 9 : 6; }
};

struct Linearized {
  Eigen::VectorXd residual;                 // whitened
  std::vector<Eigen::MatrixXd> jacobians;   // whitened, one per var
};

class Factor {
 public:
  virtual ~Factor() = default;
  virtual const std::vector<VarRef>& vars() const = 0;
  virtual Linearized linearize(const Values& values) const = 0;
  virtual int residual_dim() const = 0;

  double error(const Values& values) const {
    return linearize(values).residual.squaredNorm();
  }
};

using FactorPtr = std::shared_ptr<Factor>;

// ---- concrete factors ----------------------------------------------------

class PositionFactor : public Factor {
 public:
  PositionFactor(int epoch, const GnssPosition& z);
  const std::vector<VarRef>& vars() const override { return vars_; }
  Linearized linearize(const Values& values) const override;
  int residual_dim() const override { return 3; }

 private:
  std::vector<VarRef> vars_;
  GnssPosition z_;
  Mat3 sqrt_info_;
};

class MovingBaselineFactor : public Factor {
 public:
  MovingBaselineFactor(int epoch, const MovingBaseline& z);
  const std::vector<VarRef>& vars() const override { return vars_; }
  Linearized linearize(const Values& values) const override;
  int residual_dim() const override { return 3; }

 private:
  std::vector<VarRef> vars_;
  MovingBaseline z_;
  Mat3 sqrt_info_;
};

// Preintegrated IMU between epochs i and i+1. Holds the preintegration
// mutable: the owner re-integrates it when the linearization bias drifts.
class ImuFactor : public Factor {
 public:
  ImuFactor(int epoch_i, int epoch_j, std::shared_ptr<PreintegratedImu> pim,
            const Vec3& gravity);
  const std::vector<VarRef>& vars() const override { return vars_; }
  Linearized linearize(const Values& values) const override;
  int residual_dim() const override { return 9; }

  PreintegratedImu& pim() { return *pim_; }
  const PreintegratedImu& pim() const { return *pim_; }
  int epoch_i() const { return vars_[0].epoch; }

 private:
  std::vector<VarRef> vars_;
  std::shared_ptr<PreintegratedImu> pim_;
  Vec3 gravity_;
};

// Brownian-motion link between consecutive bias estimates.
class BiasWalkFactor : public Factor {
 public:
  BiasWalkFactor(int epoch_i, int epoch_j, double sigma_ba, double sigma_bg,
                 double dt);
  const std::vector<VarRef>& vars() const override { return vars_; }
  Linearized linearize(const Values& values) const override;
  int residual_dim() const override { return 6; }

 private:
  std::vector<VarRef> vars_;
  Vec6 inv_std_;
};

class StatePriorFactor : public Factor {
 public:
  StatePriorFactor(int epoch, const NavState& mean, const Vec9& sigmas);
  const std::vector<VarRef>& vars() const override { return vars_; }
  Linearized linearize(const Values& values) const override;
  int residual_dim() const override { return 9; }

 private:
  std::vector<VarRef> vars_;
  NavState mean_;
  Vec9 inv_std_;
};

class BiasPriorFactor : public Factor {
 public:
  BiasPriorFactor(int epoch, const Vec6& mean, const Vec6& sigmas);
  const std::vector<VarRef>& vars() const override { return vars_; }
  Linearized linearize(const Values& values) const override;
  int residual_dim() const override { return 6; }

 private:
  std::vector<VarRef> vars_;
  Vec6 mean_, inv_std_;
};

class LeverPriorFactor : public Factor {
 public:
  LeverPriorFactor(const Vec6& mean, const Vec6& sigmas);
  const std::vector<VarRef>& vars() const override { return vars_; }
  Linearized linearize(const Values& values) const override;
  int residual_dim() const override { return 6; }

 private:
  std::vector<VarRef> vars_;
  Vec6 mean_, inv_std_;
};

// Dense Gaussian prior produced by marginalizing states out of the
// fixed-lag window. Operates on local coordinates around the stored
// linearization values.
class MarginalPriorFactor : public Factor {
 public:
  MarginalPriorFactor(std::vector<VarRef> vars, Values linearization,
                      const Eigen::MatrixXd& hessian,
                      const Eigen::VectorXd& gradient);
  const std::vector<VarRef>& vars() const override { return vars_; }
  Linearized linearize(const Values& values) const override;
  int residual_dim() const override { return dim_; }

 private:
  std::vector<VarRef> vars_;
  Values lin_;  // only the referenced entries are meaningful
  Eigen::MatrixXd sqrt_info_;  // L^T with H = L L^T
  Eigen::VectorXd offset_;     // L^-1 g
  int dim_ = 0;
};

// ---- graph ----------------------------------------------------------------

struct FactorGraph {
  std::vector<FactorPtr> factors;

  double cost(const Values& values) const {
    double total = 0.0;
    for (const auto& f : factors) total += f->error(values);
    return total;
  }

  // Re-integrates IMU factors whose linearization bias moved by more than
  // the threshold in any component. Returns the number touched.
  int refresh_preintegrations(const Values& values, double threshold = 1e-3);
};

// Whitening helper: sqrt information from a covariance (lower Cholesky of
// the inverse).
Mat3 sqrt_information(const Mat3& cov);

}  // namespace gpsar::est
