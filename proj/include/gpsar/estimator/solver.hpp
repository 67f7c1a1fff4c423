#pragma once

#include <Eigen/Sparse>
#include <unordered_map>

#include "gpsar/estimator/graph.hpp"

namespace gpsar::est {

// Column layout of the linear system: 15 per epoch (9 state + 6 bias) in
// epoch order, shared lever arm last.
class Ordering {
 public:
  Ordering() = default;
  Ordering(std::vector<int> epochs, bool include_lever = true);

  int dim() const { return 15 * static_cast<int>(epochs_.size()) + (lever_ ? 6 : 0); }
  int offset(const VarRef& var) const;
  bool contains(const VarRef& var) const;
  const std::vector<int>& epochs() const { return epochs_; }

 private:
  std::vector<int> epochs_;
  std::unordered_map<int, int> slot_;
  bool lever_ = true;
};

struct SolveStats {
  double initial_cost = 0.0;
  double final_cost = 0.0;
  int iterations = 0;
  bool converged = false;
  int reintegrations = 0;
  std::string note;  // diagnostics such as weak-prior insertions
};

struct GnOptions {
  int max_iterations = 25;
  double gradient_tol = 1e-8;
  double step_tol = 1e-12;
  double bias_reintegration_threshold = 1e-3;
};

struct LmOptions {
  int max_iterations = 100;
  double rel_cost_tol = 1e-10;
  double initial_lambda = 1e-6;
  double bias_reintegration_threshold = 1e-3;
};

// Normal-equations assembly over the ordering. Dense below ~1200 columns,
// sparse Cholesky above.
struct NormalEquations {
  Eigen::VectorXd gradient;  // J^T r
  Eigen::MatrixXd dense;     // valid when !sparse
  Eigen::SparseMatrix<double> sparse_h;
  bool sparse = false;
  double cost = 0.0;
};

NormalEquations assemble(const FactorGraph& graph, const Ordering& ordering,
                         const Values& values);

// Solves (H + lambda diag(H)) dx = -g; adds a weak diagonal prior and
// reports it in the note when the system is indeterminate.
Eigen::VectorXd solve_normal_equations(NormalEquations& eq, double lambda,
                                       std::string* note);

void retract(const Ordering& ordering, const Eigen::VectorXd& delta,
             Values* values);

SolveStats gauss_newton(FactorGraph& graph, const Ordering& ordering,
                        Values* values, const GnOptions& opts = {});

// Levenberg-Marquardt to convergence; preintegrations are refreshed at the
// current bias estimates between accepted steps.
SolveStats levenberg_marquardt(FactorGraph& graph, const Ordering& ordering,
                               Values* values, const LmOptions& opts = {});

// Marginal covariance block of the listed variables out of the full
// normal equations (linearized at the given values).
Eigen::MatrixXd marginal_covariance(const FactorGraph& graph,
                                    const Ordering& ordering,
                                    const Values& values,
                                    const std::vector<VarRef>& vars);

}  // namespace gpsar::est
