#include "gpsar/estimator/solver.hpp"

#include <Eigen/SparseCholesky>

namespace gpsar::est {

namespace {
constexpr int kDenseLimit = 1200;
constexpr double kWeakPrior = 1e-8;
}  // namespace

Ordering::Ordering(std::vector<int> epochs, bool include_lever)
    : epochs_(std::move(epochs)), lever_(include_lever) {
  for (size_t i = 0; i < epochs_.size(); ++i) {
    slot_[epochs_[i]] = static_cast<int>(i);
  }
}

bool Ordering::contains(const VarRef& var) const {
  if (var.kind == VarRef::kLever) return lever_;
  return slot_.count(var.epoch) > 0;
}

int Ordering::offset(const VarRef& var) const {
  if (var.kind == VarRef::kLever) {
    return 15 * static_cast<int>(epochs_.size());
  }
  const auto it = slot_.find(var.epoch);
  if (it == slot_.end()) {
    throw NumericalError("factor references an epoch outside the ordering");
  }
  return 15 * it->second + (var.kind == VarRef::kBias ? 9 : 0);
}

NormalEquations assemble(const FactorGraph& graph, const Ordering& ordering,
                         const Values& values) {
  const int n = ordering.dim();
  NormalEquations eq;
  eq.gradient = Eigen::VectorXd::Zero(n);
  eq.sparse = n > kDenseLimit;
  std::vector<Eigen::Triplet<double>> triplets;
  if (eq.sparse) {
    triplets.reserve(graph.factors.size() * 24 * 24);
  } else {
    eq.dense = Eigen::MatrixXd::Zero(n, n);
  }

  for (const auto& factor : graph.factors) {
    const Linearized lin = factor->linearize(values);
    eq.cost += lin.residual.squaredNorm();
    const auto& vars = factor->vars();
    for (size_t a = 0; a < vars.size(); ++a) {
      const int oa = ordering.offset(vars[a]);
      eq.gradient.segment(oa, vars[a].dim()) +=
          lin.jacobians[a].transpose() * lin.residual;
      for (size_t b = 0; b < vars.size(); ++b) {
        const int ob = ordering.offset(vars[b]);
        const Eigen::MatrixXd block =
            lin.jacobians[a].transpose() * lin.jacobians[b];
        if (eq.sparse) {
          for (int i = 0; i < block.rows(); ++i) {
            for (int j = 0; j < block.cols(); ++j) {
              if (block(i, j) != 0.0) {
                triplets.emplace_back(oa + i, ob + j, block(i, j));
              }
            }
          }
        } else {
          eq.dense.block(oa, ob, block.rows(), block.cols()) += block;
        }
      }
    }
  }
  if (eq.sparse) {
    eq.sparse_h.resize(n, n);
    eq.sparse_h.setFromTriplets(triplets.begin(), triplets.end());
  }
  return eq;
}

Eigen::VectorXd solve_normal_equations(NormalEquations& eq, double lambda,
                                       std::string* note) {
  const int n = static_cast<int>(eq.gradient.size());
  if (!eq.sparse) {
    Eigen::MatrixXd h = eq.dense;
    if (lambda > 0.0) h += lambda * eq.dense.diagonal().asDiagonal();
    Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
    if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
      return ldlt.solve(-eq.gradient);
    }
    // Indeterminate: add a weak prior instead of failing.
    if (note && note->find("weak prior") == std::string::npos) {
      *note += "indeterminate system, weak prior added; ";
    }
    h += kWeakPrior * Eigen::MatrixXd::Identity(n, n);
    return Eigen::LDLT<Eigen::MatrixXd>(h).solve(-eq.gradient);
  }

  Eigen::SparseMatrix<double> h = eq.sparse_h;
  if (lambda > 0.0) {
    for (int i = 0; i < n; ++i) h.coeffRef(i, i) *= (1.0 + lambda);
  }
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(h);
  if (ldlt.info() != Eigen::Success) {
    if (note && note->find("weak prior") == std::string::npos) {
      *note += "indeterminate system, weak prior added; ";
    }
    for (int i = 0; i < n; ++i) h.coeffRef(i, i) += kWeakPrior;
    ldlt.compute(h);
    if (ldlt.info() != Eigen::Success) {
      throw NumericalError("sparse factorization failed");
    }
  }
  return ldlt.solve(-eq.gradient);
}

void retract(const Ordering& ordering, const Eigen::VectorXd& delta,
             Values* values) {
  for (int epoch : ordering.epochs()) {
    const int o = ordering.offset({VarRef::kState, epoch});
    NavState& x = values->states[epoch];
    x.rotation = x.rotation * Rot3::exp(delta.segment<3>(o));
    x.position += delta.segment<3>(o + 3);
    x.velocity += delta.segment<3>(o + 6);
    values->bias[epoch] += delta.segment<6>(o + 9);
  }
  values->lever += delta.segment<6>(ordering.offset({VarRef::kLever, 0}));
}

SolveStats gauss_newton(FactorGraph& graph, const Ordering& ordering,
                        Values* values, const GnOptions& opts) {
  SolveStats stats;
  for (int it = 0; it < opts.max_iterations; ++it) {
    stats.reintegrations += graph.refresh_preintegrations(
        *values, opts.bias_reintegration_threshold);
    NormalEquations eq = assemble(graph, ordering, *values);
    if (it == 0) stats.initial_cost = eq.cost;
    stats.final_cost = eq.cost;
    if (eq.gradient.norm() < opts.gradient_tol) {
      stats.converged = true;
      break;
    }
    const Eigen::VectorXd delta =
        solve_normal_equations(eq, 0.0, &stats.note);
    retract(ordering, delta, values);
    ++stats.iterations;
    if (delta.cwiseAbs().maxCoeff() < opts.step_tol) {
      stats.converged = true;
      break;
    }
  }
  // Record the cost actually achieved.
  stats.final_cost = graph.cost(*values);
  return stats;
}

SolveStats levenberg_marquardt(FactorGraph& graph, const Ordering& ordering,
                               Values* values, const LmOptions& opts) {
  SolveStats stats;
  stats.reintegrations += graph.refresh_preintegrations(
      *values, opts.bias_reintegration_threshold);
  double lambda = opts.initial_lambda;
  double cost = graph.cost(*values);
  stats.initial_cost = cost;

  for (int it = 0; it < opts.max_iterations; ++it) {
    NormalEquations eq = assemble(graph, ordering, *values);
    cost = eq.cost;

    bool accepted = false;
    for (int attempt = 0; attempt < 12; ++attempt) {
      const Eigen::VectorXd delta =
          solve_normal_equations(eq, lambda, &stats.note);
      Values candidate = *values;
      retract(ordering, delta, &candidate);
      const double candidate_cost = graph.cost(candidate);
      if (candidate_cost < cost) {
        *values = std::move(candidate);
        const double rel = (cost - candidate_cost) / std::max(cost, 1e-300);
        cost = candidate_cost;
        lambda = std::max(lambda / 3.0, 1e-12);
        accepted = true;
        ++stats.iterations;
        stats.reintegrations += graph.refresh_preintegrations(
            *values, opts.bias_reintegration_threshold);
        if (rel < opts.rel_cost_tol) {
          stats.converged = true;
        }
        break;
      }
      lambda *= 4.0;
    }
    if (!accepted) {
      stats.note += "cost non-decreasing at iteration " +
                    std::to_string(it) + "; ";
      stats.converged = true;
    }
    if (stats.converged) break;
  }
  stats.final_cost = graph.cost(*values);
  return stats;
}

Eigen::MatrixXd marginal_covariance(const FactorGraph& graph,
                                    const Ordering& ordering,
                                    const Values& values,
                                    const std::vector<VarRef>& vars) {
  NormalEquations eq = assemble(graph, ordering, values);
  int total = 0;
  for (const auto& v : vars) total += v.dim();
  Eigen::MatrixXd cols(ordering.dim(), total);
  cols.setZero();
  int c = 0;
  for (const auto& v : vars) {
    const int o = ordering.offset(v);
    for (int i = 0; i < v.dim(); ++i) cols(o + i, c++) = 1.0;
  }

  Eigen::MatrixXd solved;
  if (!eq.sparse) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(eq.dense);
    if (ldlt.info() != Eigen::Success) {
      throw NumericalError("marginal covariance: factorization failed");
    }
    solved = ldlt.solve(cols);
  } else {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(eq.sparse_h);
    if (ldlt.info() != Eigen::Success) {
      throw NumericalError("marginal covariance: factorization failed");
    }
    solved = ldlt.solve(cols);
  }

  Eigen::MatrixXd out(total, total);
  int r = 0;
  for (const auto& v : vars) {
    const int o = ordering.offset(v);
    out.middleRows(r, v.dim()) = solved.middleRows(o, v.dim());
    r += v.dim();
  }
  return out;
}

}  // namespace gpsar::est
