#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "splitclust/graph.hpp"
#include "splitclust/matrix.hpp"
#include "splitclust/tolerances.hpp"

namespace splitclust {

struct SolverConfig {
  double eta = 0.5;     // weight on the entrywise l1 term; 1-eta weighs the nuclear term
  double tol_rel = 1e-7;  // relative feasibility residual on the observed entries
  int max_iters = 1000;
  double mu0 = 0.0;  // initial penalty; 0 selects 1.25 / spectral norm of the data
  double rho = 1.5;  // penalty growth factor
  double mu_max = 1e7;
  bool init_b_with_data = false;  // start from B = observed data instead of B = 0

  void validate() const {
    if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("SolverConfig: eta must be in (0,1)");
    if (!(tol_rel > 0.0)) throw std::invalid_argument("SolverConfig: tol_rel must be positive");
    if (max_iters < 1) throw std::invalid_argument("SolverConfig: max_iters must be >= 1");
    if (!(rho > 1.0)) throw std::invalid_argument("SolverConfig: rho must exceed 1");
    if (mu0 < 0.0) throw std::invalid_argument("SolverConfig: mu0 must be nonnegative");
    if (!(mu_max > 0.0)) throw std::invalid_argument("SolverConfig: mu_max must be positive");
  }
};

struct SplitSolution {
  Matrix b;
  Matrix k;
  double eta = 0.0;
  int iters = 0;
  double residual = 0.0;  // relative feasibility residual at exit
  bool converged = false;
  double objective = 0.0;
};

inline double objective(const Matrix& b, const Matrix& k, double eta) {
  if (b.rows() != k.rows() || b.cols() != k.cols())
    throw std::invalid_argument("objective: dimension mismatch");
  return eta * norm(b, Norm::L1) + (1.0 - eta) * norm(k, Norm::Nuclear);
}

// Splits the observed part of I + A into a sparse disagreement part B and a
// low-rank cluster part K by minimizing eta*||B||_1 + (1-eta)*||K||_* subject
// to agreement with the observations, using an inexact augmented Lagrangian
// with singular-value thresholding.
//
// Unobserved entries impose no constraint: B is l1-penalized there and free,
// so its optimum is zero off the observed set; the K update therefore sees a
// completed data matrix whose unobserved entries carry the current K. The
// diagonal is treated as observed and equal to one.
//
// Non-convergence within max_iters is reported through converged=false, not
// an exception.
inline SplitSolution solve_split(const PartialGraph& g, const SolverConfig& cfg) {
  cfg.validate();
  const int n = g.n();
  if (n < 2) throw std::invalid_argument("solve_split: need at least two nodes");
  if (g.observed_count() == 0) throw std::invalid_argument("solve_split: empty observation set");

  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> obs(n, n);
  obs.setConstant(false);
  Matrix data = Matrix::Zero(n, n);  // observed part of I + A
  for (int i = 0; i < n; ++i) {
    obs(i, i) = true;
    data(i, i) = 1.0;
  }
  for (const ObservedPair& p : g.observed_pairs()) {
    obs(p.i, p.j) = obs(p.j, p.i) = true;
    if (p.edge) data(p.i, p.j) = data(p.j, p.i) = 1.0;
  }

  const double denom = data.norm();  // >= sqrt(n) through the diagonal
  double mu = cfg.mu0 > 0.0 ? cfg.mu0 : 1.25 / std::max(norm(data, Norm::Spectral), 1e-12);

  Matrix b = cfg.init_b_with_data ? data : Matrix::Zero(n, n);
  Matrix k = Matrix::Zero(n, n);
  Matrix y = Matrix::Zero(n, n);
  const Matrix zero = Matrix::Zero(n, n);

  SplitSolution sol;
  sol.eta = cfg.eta;
  double residual = std::numeric_limits<double>::infinity();

  int it = 0;
  while (it < cfg.max_iters) {
    ++it;
    // data completed with the current K off the observed set
    const Matrix completed = obs.select(data, k);
    k = sv_threshold(completed - b + y / mu, (1.0 - cfg.eta) / mu);
    b = obs.select(soft_threshold(completed - k + y / mu, cfg.eta / mu), zero);
    const Matrix gap = obs.select(data - b - k, zero);
    residual = gap.norm() / denom;
    if (residual <= cfg.tol_rel) {
      sol.converged = true;
      break;
    }
    y += mu * gap;
    mu = std::min(mu * cfg.rho, cfg.mu_max);
  }

  sol.b = std::move(b);
  sol.k = std::move(k);
  sol.iters = it;
  sol.residual = residual;
  sol.objective = objective(sol.b, sol.k, cfg.eta);
  return sol;
}

}  // namespace splitclust
