#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "splitclust/clustering.hpp"
#include "splitclust/graph.hpp"
#include "splitclust/matrix.hpp"
#include "splitclust/rng.hpp"
#include "splitclust/subspace.hpp"
#include "splitclust/tolerances.hpp"

namespace splitclust {

// ---------------------------------------------------------------------------
// Per-node disagreement statistics
// ---------------------------------------------------------------------------

// d[i][c] counts the bad entries (observed disagreements plus unobserved
// pairs) between node i and cluster c: for c != C(i) these are unobserved or
// present pairs, for c = C(i) unobserved or missing pairs (j != i). dmax is
// the largest d[i][c] / min(|c|, |C(i)|), and
// alpha = 3 (1 - 1/K_1) dmax + 1/K_p^2 with K_1 the largest and K_p the
// smallest cluster size.
struct DisagreementStats {
  int n = 0;
  std::vector<std::vector<long>> d;  // node x cluster
  double dmax = 0.0;
  double alpha = 0.0;
  int kmin = 0;
  int k1 = 0;
  int kp = 0;
};

inline DisagreementStats disagreement_stats(const PartialGraph& g, const Clustering& c) {
  if (g.n() != c.n()) throw std::invalid_argument("disagreement_stats: size mismatch");
  const int n = g.n();
  const int p = c.cluster_count();

  DisagreementStats stats;
  stats.n = n;
  stats.d.assign(static_cast<std::size_t>(n), std::vector<long>(static_cast<std::size_t>(p), 0));

  for (int i = 0; i < n; ++i) {
    const int ci = c.label(i);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const int cj = c.label(j);
      const PairState s = g.pair(std::min(i, j), std::max(i, j));
      bool bad = false;
      if (cj == ci)
        bad = s == PairState::Unobserved || s == PairState::NonEdge;
      else
        bad = s == PairState::Unobserved || s == PairState::Edge;
      if (bad) ++stats.d[static_cast<std::size_t>(i)][static_cast<std::size_t>(cj)];
    }
  }

  const std::vector<int> sizes = c.sizes_descending();
  stats.k1 = sizes.front();
  stats.kp = sizes.back();
  stats.kmin = stats.kp;

  for (int i = 0; i < n; ++i) {
    const int own = c.cluster_size(c.label(i));
    for (int cl = 0; cl < p; ++cl) {
      const double denom = static_cast<double>(std::min(c.cluster_size(cl), own));
      stats.dmax = std::max(
          stats.dmax,
          static_cast<double>(stats.d[static_cast<std::size_t>(i)][static_cast<std::size_t>(cl)]) /
              denom);
    }
  }

  stats.alpha = 3.0 * (1.0 - 1.0 / static_cast<double>(stats.k1)) * stats.dmax +
                1.0 / (static_cast<double>(stats.kp) * static_cast<double>(stats.kp));
  return stats;
}

// ---------------------------------------------------------------------------
// Closed-form recovery conditions
// ---------------------------------------------------------------------------

struct EtaInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool feasible = false;

  double midpoint() const { return 0.5 * (lo + hi); }
};

// Deterministic recovery window: when n*dmax/kmin < 1/4 the clustering pair
// is the unique optimum for every eta strictly inside (lo, hi) with
//   lo = 1 / (1 + kmin/2),
//   hi = 1 - kmin / ((1 + 3/(4 n dmax)) kmin - 1),
// and hi = 1 in the disagreement-free case. The window is empty exactly when
// the ratio condition fails.
inline EtaInterval recovery_interval(const DisagreementStats& s) {
  EtaInterval out;
  out.lo = 1.0 / (1.0 + 0.5 * static_cast<double>(s.kmin));
  if (s.dmax == 0.0) {
    out.hi = 1.0;
  } else {
    const double k = static_cast<double>(s.kmin);
    out.hi = 1.0 - k / ((1.0 + 3.0 / (4.0 * s.n * s.dmax)) * k - 1.0);
  }
  out.feasible = out.lo < out.hi;
  return out;
}

// Sufficient condition for the cluster space and the complement of the
// observed-agreement support to intersect trivially: n*dmax/kmin < 1.
inline bool check_space_intersection(const DisagreementStats& s) {
  return static_cast<double>(s.n) * s.dmax / static_cast<double>(s.kmin) < 1.0;
}

// Conditions of the random observation/noise model. The theory guarantees
// existence of constants without giving values; the defaults below are
// heuristic desk-scale stand-ins and both are caller-overridable.
struct RandomModelReport {
  bool tau_ok = false;
  bool kmin_ok = false;
  double kmin_threshold = 0.0;
  double eta = 0.0;
};

inline RandomModelReport random_model_check(int n, double p0, double tau, int kmin,
                                            double c_d = 0.05, double c_k = 1.0) {
  if (n < 1) throw std::invalid_argument("random_model_check: n must be >= 1");
  if (!(p0 > 0.0 && p0 <= 1.0))
    throw std::invalid_argument("random_model_check: p0 must be in (0,1]");
  if (!(tau >= 0.0 && tau < 1.0))
    throw std::invalid_argument("random_model_check: tau must be in [0,1)");
  RandomModelReport r;
  r.tau_ok = tau <= c_d;
  const double logn = std::log(static_cast<double>(n));
  r.kmin_threshold = c_k * std::sqrt(static_cast<double>(n) * logn * logn * logn * logn / p0);
  r.kmin_ok = static_cast<double>(kmin) >= r.kmin_threshold;
  r.eta = 1.0 / (1.0 + std::sqrt(static_cast<double>(n) * p0));
  return r;
}

// ---------------------------------------------------------------------------
// Certificate condition reporting
// ---------------------------------------------------------------------------

struct ConditionCheck {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  bool strict = false;  // pass needs value < bound; otherwise value <= bound
  bool pass = false;
};

inline ConditionCheck make_check(std::string name, double value, double bound, bool strict) {
  ConditionCheck c{std::move(name), value, bound, strict, false};
  c.pass = strict ? value < bound : value <= bound;
  return c;
}

inline bool all_pass(const std::vector<ConditionCheck>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const ConditionCheck& c) { return c.pass; });
}

// ---------------------------------------------------------------------------
// Worst-case certificate: alternating projection series
// ---------------------------------------------------------------------------

struct WorstCaseCertificate {
  Matrix q;
  int series_terms = 0;
  bool converged = false;
  double theta_estimate = 0.0;  // per-term geometric ratio estimate
  std::vector<double> s_term_norms;
  std::vector<double> v_term_norms;
  std::vector<ConditionCheck> residuals;  // filled by verify_deterministic
};

namespace detail {

struct SeriesResult {
  Matrix sum;
  int terms = 0;
  bool converged = false;
  double theta = 0.0;
  std::vector<double> term_norms;
};

// Alternating series sum_k (-1)^k u_k with u_0 = seed and subsequent terms
// produced by alternately applying the two projections, the T projection
// first iff t_first. Stops when a term's Frobenius norm drops below tol.
inline SeriesResult alternating_series(const Matrix& seed, bool t_first, const SubspaceBasis& basis,
                                       const IndexSet& gamma, double tol, int max_terms) {
  SeriesResult r;
  r.sum = seed;
  Matrix term = seed;
  double sign = 1.0;
  bool apply_t = t_first;
  r.term_norms.push_back(term.norm());
  r.terms = 1;
  if (r.term_norms.back() < tol) {
    r.converged = true;
    return r;
  }
  while (r.terms < max_terms) {
    term = apply_t ? project_T(term, basis)
                   : project_set_complement(term, gamma, /*include_diagonal=*/true);
    apply_t = !apply_t;
    sign = -sign;
    r.sum += sign * term;
    ++r.terms;
    r.term_norms.push_back(term.norm());
    if (r.term_norms.back() < tol) {
      r.converged = true;
      break;
    }
  }
  // geometric ratio over the settled part of the series
  for (std::size_t k = 4; k < r.term_norms.size(); ++k) {
    if (r.term_norms[k - 2] > 0.0)
      r.theta = std::max(r.theta, std::sqrt(r.term_norms[k] / r.term_norms[k - 2]));
  }
  return r;
}

inline Matrix sign_matrix(const Matrix& m) {
  return m.unaryExpr([](double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); });
}

}  // namespace detail

// Builds the deterministic dual certificate
//   Q = (1-eta) * V_{UU^T} + eta * S_{sgn(B*)}
// from the two alternating projection series seeded at UU^T and sgn(B*).
// Divergence is reported through converged=false, never an exception.
inline WorstCaseCertificate build_worstcase_certificate(const Clustering& c, const Matrix& bstar,
                                                        const IndexSet& omega_obs, double eta,
                                                        double series_tol = kTol.series,
                                                        int max_terms = 500) {
  if (!(eta > 0.0 && eta < 1.0))
    throw std::invalid_argument("build_worstcase_certificate: eta must be in (0,1)");
  require_symmetric(bstar);
  if (bstar.rows() != c.n())
    throw std::invalid_argument("build_worstcase_certificate: dimension mismatch");

  const SubspaceBasis basis(c);
  const Matrix sgn_b = detail::sign_matrix(bstar);

  // gamma = observed pairs outside the disagreement support
  std::vector<std::pair<int, int>> gamma_pairs;
  for (const auto& [i, j] : omega_obs.pairs)
    if (i != j && sgn_b(i, j) == 0.0) gamma_pairs.emplace_back(i, j);
  const IndexSet gamma = make_index_set(std::move(gamma_pairs));

  const detail::SeriesResult s = detail::alternating_series(sgn_b, /*t_first=*/true, basis, gamma,
                                                            series_tol, max_terms);
  const detail::SeriesResult v = detail::alternating_series(basis.uut(), /*t_first=*/false, basis,
                                                            gamma, series_tol, max_terms);

  WorstCaseCertificate cert;
  cert.q = (1.0 - eta) * v.sum + eta * s.sum;
  cert.series_terms = std::max(s.terms, v.terms);
  cert.converged = s.converged && v.converged;
  cert.theta_estimate = std::max(s.theta, v.theta);
  cert.s_term_norms = s.term_norms;
  cert.v_term_norms = v.term_norms;
  return cert;
}

// Residuals against the five optimality conditions of the deterministic
// certificate: three construction equalities (support outside the observed
// set, the projection onto the cluster space, and the match with the signed
// disagreements) plus two strict norm bounds.
inline std::vector<ConditionCheck> verify_deterministic(const WorstCaseCertificate& cert,
                                                        const Clustering& c, const Matrix& bstar,
                                                        const IndexSet& omega_obs, double eta,
                                                        double equality_tol = kTol.certificate_equality) {
  const SubspaceBasis basis(c);
  const Matrix sgn_b = detail::sign_matrix(bstar);
  const Matrix& q = cert.q;

  std::vector<std::pair<int, int>> omega_pairs;
  for (const auto& [i, j] : omega_obs.pairs)
    if (i != j && sgn_b(i, j) != 0.0) omega_pairs.emplace_back(i, j);
  const IndexSet omega = make_index_set(std::move(omega_pairs));

  std::vector<ConditionCheck> checks;
  checks.push_back(make_check(
      "q_outside_observed",
      norm(project_set_complement(q, omega_obs, /*include_diagonal=*/true), Norm::LInf),
      equality_tol, false));
  checks.push_back(make_check("q_t_projection",
                              (project_T(q, basis) - (1.0 - eta) * basis.uut()).norm(),
                              equality_tol, false));
  checks.push_back(make_check(
      "q_sign_match",
      norm(project_set(q, omega, /*include_diagonal=*/false) - eta * sgn_b, Norm::LInf),
      equality_tol, false));
  checks.push_back(make_check("q_tperp_spectral", norm(project_Tperp(q, basis), Norm::Spectral),
                              1.0 - eta, true));
  checks.push_back(make_check(
      "q_offsupport_inf",
      norm(project_set_complement(q, omega, /*include_diagonal=*/false), Norm::LInf), eta, true));
  return checks;
}

// ---------------------------------------------------------------------------
// Golfing certificate: randomized sampling recursion
// ---------------------------------------------------------------------------

struct GolfingParams {
  int k0 = 0;
  double q = 0.0;
};

// k0 = ceil(4 ln n); q solves p0(1-tau) = 1 - (1-q)^k0, so that k0
// independent rate-q samplings union to the observed-agreement rate.
// The log is natural (the conservative, larger choice for n >= 3); pass an
// explicit k0 downstream to override.
inline GolfingParams golfing_params(int n, double p0, double tau) {
  if (n < 2) throw std::invalid_argument("golfing_params: n must be >= 2");
  if (!(p0 > 0.0 && p0 <= 1.0)) throw std::invalid_argument("golfing_params: p0 must be in (0,1]");
  if (!(tau >= 0.0 && tau < 1.0)) throw std::invalid_argument("golfing_params: tau must be in [0,1)");
  const double rate = p0 * (1.0 - tau);
  if (rate <= 0.0) throw std::invalid_argument("golfing_params: p0*(1-tau) must be positive");
  GolfingParams gp;
  gp.k0 = static_cast<int>(std::ceil(4.0 * std::log(static_cast<double>(n))));
  gp.q = 1.0 - std::pow(1.0 - rate, 1.0 / static_cast<double>(gp.k0));
  return gp;
}

// Splits an index set into k0 random subsets whose union is the whole set.
// Each pair draws k0 independent Bernoulli(q) indicators conditioned on at
// least one success (by rejection), and joins every subset with a success.
inline std::vector<IndexSet> sample_gamma_partition(const IndexSet& gamma, int k0, double q,
                                                    std::uint64_t seed) {
  if (k0 < 1) throw std::invalid_argument("sample_gamma_partition: k0 must be >= 1");
  if (!(q > 0.0 && q <= 1.0))
    throw std::invalid_argument("sample_gamma_partition: q must be in (0,1]");
  Rng rng(seed);
  std::vector<std::vector<std::pair<int, int>>> parts(static_cast<std::size_t>(k0));
  std::vector<bool> hit(static_cast<std::size_t>(k0));
  for (const auto& pr : gamma.pairs) {
    bool any = false;
    while (!any) {
      for (int k = 0; k < k0; ++k) {
        hit[static_cast<std::size_t>(k)] = rng.bernoulli(q);
        any = any || hit[static_cast<std::size_t>(k)];
      }
    }
    for (int k = 0; k < k0; ++k)
      if (hit[static_cast<std::size_t>(k)]) parts[static_cast<std::size_t>(k)].push_back(pr);
  }
  std::vector<IndexSet> out;
  out.reserve(static_cast<std::size_t>(k0));
  for (auto& p : parts) out.push_back(IndexSet{std::move(p)});
  return out;
}

struct GolfingCertificate {
  Matrix wb;
  Matrix wk;
  int k0 = 0;
  double q = 0.0;
  std::vector<IndexSet> gamma_parts;
  std::vector<double> wk_target_residuals;  // ||P_T(W^K_k) - UU^T||_F after each step
  std::vector<ConditionCheck> residuals;    // filled by verify_probabilistic
};

// Runs the two golfing recursions from zero over the given sampling sets:
//   W^B_k = W^B_{k-1} - R_k( P_T( eta/(1-eta) P_T(sgn B*) + W^B_{k-1} ) )
//   W^K_k = W^K_{k-1} + R_k( P_T( UU^T - W^K_{k-1} ) )
// and returns W^B = W^B_{k0} + eta/(1-eta) sgn(B*), W^K = W^K_{k0}.
inline GolfingCertificate build_golfing_certificate(const Clustering& c, const Matrix& bstar,
                                                    const std::vector<IndexSet>& gamma_parts,
                                                    double q, double eta) {
  if (!(eta > 0.0 && eta < 1.0))
    throw std::invalid_argument("build_golfing_certificate: eta must be in (0,1)");
  if (gamma_parts.empty())
    throw std::invalid_argument("build_golfing_certificate: no sampling sets");
  require_symmetric(bstar);
  if (bstar.rows() != c.n())
    throw std::invalid_argument("build_golfing_certificate: dimension mismatch");

  const int n = c.n();
  const SubspaceBasis basis(c);
  const Matrix uut = basis.uut();
  const Matrix sgn_b = detail::sign_matrix(bstar);
  const double ratio = eta / (1.0 - eta);
  const Matrix pt_sgn_b = project_T(sgn_b, basis);

  GolfingCertificate cert;
  cert.k0 = static_cast<int>(gamma_parts.size());
  cert.q = q;
  cert.gamma_parts = gamma_parts;

  Matrix wb = Matrix::Zero(n, n);
  Matrix wk = Matrix::Zero(n, n);
  for (const IndexSet& part : gamma_parts) {
    wb -= rescaled_restriction(project_T(ratio * pt_sgn_b + wb, basis), part, q);
    wk += rescaled_restriction(project_T(uut - wk, basis), part, q);
    cert.wk_target_residuals.push_back((project_T(wk, basis) - uut).norm());
  }
  cert.wb = wb + ratio * sgn_b;
  cert.wk = std::move(wk);
  return cert;
}

// Residuals against the nine optimality conditions of the randomized
// certificate: four construction equalities and five norm bounds. The norm
// bounds come from asymptotic constants, so violated margins are reported,
// never thrown.
inline std::vector<ConditionCheck> verify_probabilistic(const GolfingCertificate& cert,
                                                        const Clustering& c, const Matrix& bstar,
                                                        const IndexSet& gamma, double eta,
                                                        double equality_tol = kTol.certificate_equality) {
  const SubspaceBasis basis(c);
  const Matrix uut = basis.uut();
  const Matrix sgn_b = detail::sign_matrix(bstar);
  const double ratio = eta / (1.0 - eta);
  const int n = c.n();
  const double fro_bound = 1.0 / (2.0 * static_cast<double>(n) * static_cast<double>(n));

  std::vector<std::pair<int, int>> omega_pairs;
  std::vector<std::pair<int, int>> obs_pairs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (sgn_b(i, j) != 0.0) omega_pairs.emplace_back(i, j);
  obs_pairs = gamma.pairs;
  obs_pairs.insert(obs_pairs.end(), omega_pairs.begin(), omega_pairs.end());
  const IndexSet omega = make_index_set(std::move(omega_pairs));
  const IndexSet omega_obs = make_index_set(std::move(obs_pairs));

  const Matrix& wb = cert.wb;
  const Matrix& wk = cert.wk;

  std::vector<ConditionCheck> checks;
  checks.push_back(make_check("wb_t_fro", project_T(wb, basis).norm(), fro_bound, false));
  checks.push_back(
      make_check("wb_tperp_spectral", norm(project_Tperp(wb, basis), Norm::Spectral), 0.25, true));
  checks.push_back(make_check(
      "wb_sign_match",
      norm(project_set(wb, omega, /*include_diagonal=*/false) - ratio * sgn_b, Norm::LInf),
      equality_tol, false));
  checks.push_back(make_check(
      "wb_outside_observed",
      norm(project_set_complement(wb, omega_obs, /*include_diagonal=*/true), Norm::LInf),
      equality_tol, false));
  checks.push_back(make_check("wb_gamma_inf",
                              norm(project_set(wb, gamma, /*include_diagonal=*/true), Norm::LInf),
                              0.25 * ratio, true));
  checks.push_back(
      make_check("wk_tperp_spectral", norm(project_Tperp(wk, basis), Norm::Spectral), 0.25, true));
  checks.push_back(make_check("wk_t_target", (project_T(wk, basis) - uut).norm(), fro_bound, false));
  checks.push_back(make_check(
      "wk_outside_agreement",
      norm(project_set_complement(wk, gamma, /*include_diagonal=*/true), Norm::LInf), equality_tol,
      false));
  checks.push_back(make_check("wk_gamma_inf",
                              norm(project_set(wk, gamma, /*include_diagonal=*/true), Norm::LInf),
                              0.25 * ratio, true));
  return checks;
}

}  // namespace splitclust
