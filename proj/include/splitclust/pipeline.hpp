#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "splitclust/clustering.hpp"
#include "splitclust/graph.hpp"
#include "splitclust/solver.hpp"
#include "splitclust/tolerances.hpp"

namespace splitclust {

// Model-driven weight for a graph with n nodes observed at rate p0:
// eta = 1 / (1 + sqrt(n * p0)).
inline double recommended_eta(int n, double p0) {
  if (n < 1) throw std::invalid_argument("recommended_eta: n must be >= 1");
  if (!(p0 > 0.0 && p0 <= 1.0)) throw std::invalid_argument("recommended_eta: p0 must be in (0,1]");
  return 1.0 / (1.0 + std::sqrt(static_cast<double>(n) * p0));
}

// Line-search grid 0.01, 0.02, ..., 0.99.
inline std::vector<double> default_eta_grid() {
  std::vector<double> grid;
  grid.reserve(99);
  for (int i = 1; i <= 99; ++i) grid.push_back(static_cast<double>(i) / 100.0);
  return grid;
}

// Default grid with the model-driven eta tried first. The grid is a priority
// order: earlier entries are solved first.
inline std::vector<double> eta_grid_with_recommendation(int n, double p0_hat) {
  std::vector<double> grid;
  grid.push_back(recommended_eta(n, p0_hat));
  for (double eta : default_eta_grid()) grid.push_back(eta);
  return grid;
}

struct TraceEntry {
  double eta = 0.0;
  bool converged = false;
  bool valid = false;
  double residual = 0.0;
  double objective = 0.0;
};

enum class ClusterStatus { Success, Failure };

struct ClusterOutcome {
  ClusterStatus status = ClusterStatus::Failure;
  std::optional<Clustering> clustering;
  std::optional<double> eta_used;
  std::optional<long> disagreements;
  std::vector<TraceEntry> trace;
  std::optional<SplitSolution> solution;  // the winning solve, kept for audits

  bool success() const { return status == ClusterStatus::Success; }
};

// Tries each eta in order: solve, then test validity of the converged K.
// The first valid solution wins and is provably the observed-disagreement
// minimizer; if no eta yields a valid solution the outcome is Failure with
// the full trace. A non-converged solve is never validity-tested, and a
// valid rounding is accepted only if the exact clustering pair it induces
// does not have a materially worse objective than the solve itself.
inline ClusterOutcome optimal_cluster(const PartialGraph& g, const std::vector<double>& eta_grid,
                                      const SolverConfig& base_cfg = {},
                                      double validity_tol = kTol.validity) {
  if (eta_grid.empty()) throw std::invalid_argument("optimal_cluster: empty eta grid");
  for (double eta : eta_grid)
    if (!(eta > 0.0 && eta < 1.0))
      throw std::invalid_argument("optimal_cluster: eta values must lie in (0,1)");

  ClusterOutcome outcome;
  for (double eta : eta_grid) {
    SolverConfig cfg = base_cfg;
    cfg.eta = eta;
    SplitSolution sol = solve_split(g, cfg);
    TraceEntry entry{eta, sol.converged, false, sol.residual, sol.objective};

    if (sol.converged) {
      const ValidityReport report = check_validity(sol.k, validity_tol);
      if (report.valid) {
        const Matrix kstar = build_kstar(*report.clustering);
        const Matrix bstar = build_bstar(g, *report.clustering);
        const double rounded_obj = objective(bstar, kstar, eta);
        if (rounded_obj <= sol.objective + kTol.objective_recheck * std::max(1.0, sol.objective)) {
          entry.valid = true;
          outcome.trace.push_back(entry);
          outcome.status = ClusterStatus::Success;
          outcome.clustering = report.clustering;
          outcome.eta_used = eta;
          outcome.disagreements = count_disagreements(g, *report.clustering);
          outcome.solution = std::move(sol);
          return outcome;
        }
      }
    }
    outcome.trace.push_back(entry);
  }
  return outcome;
}

inline void write_trace_csv(std::ostream& out, const std::vector<TraceEntry>& trace) {
  out << "eta,converged,valid,residual,objective\n";
  char buf[160];
  for (const TraceEntry& t : trace) {
    std::snprintf(buf, sizeof(buf), "%.6g,%d,%d,%.9g,%.12g\n", t.eta, t.converged ? 1 : 0,
                  t.valid ? 1 : 0, t.residual, t.objective);
    out << buf;
  }
}

}  // namespace splitclust
