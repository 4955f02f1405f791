#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "splitclust/clustering.hpp"
#include "splitclust/graph.hpp"
#include "splitclust/matrix.hpp"

namespace splitclust {

// Orthonormal basis of the column space of a cluster matrix: one column per
// cluster, constant 1/sqrt(K_c) on the cluster support and zero elsewhere.
class SubspaceBasis {
 public:
  explicit SubspaceBasis(const Clustering& c) : n_(c.n()), p_(c.cluster_count()) {
    u_ = Matrix::Zero(n_, p_);
    for (int i = 0; i < n_; ++i) {
      const int cl = c.label(i);
      u_(i, cl) = 1.0 / std::sqrt(static_cast<double>(c.cluster_size(cl)));
    }
  }

  int n() const { return n_; }
  int p() const { return p_; }
  const Matrix& u() const { return u_; }
  Matrix uut() const { return u_ * u_.transpose(); }

 private:
  int n_;
  int p_;
  Matrix u_;
};

// Projection onto the space of matrices sharing row or column space with the
// cluster matrix: UU^T M + M UU^T - UU^T M UU^T.
inline Matrix project_T(const Matrix& m, const SubspaceBasis& b) {
  if (m.rows() != b.n() || m.cols() != b.n())
    throw std::invalid_argument("project_T: dimension mismatch");
  const Matrix& u = b.u();
  const Matrix utm = u.transpose() * m;       // p x n
  const Matrix mu = m * u;                    // n x p
  const Matrix core = utm * u;                // p x p
  return u * utm + mu * u.transpose() - u * (core * u.transpose());
}

inline Matrix project_Tperp(const Matrix& m, const SubspaceBasis& b) {
  return m - project_T(m, b);
}

// An unordered set of node pairs (i, j) with i <= j, interpreted
// symmetrically when used as an entry mask.
struct IndexSet {
  std::vector<std::pair<int, int>> pairs;

  std::size_t size() const { return pairs.size(); }
  bool empty() const { return pairs.empty(); }
};

// Canonicalizes (orders each pair, sorts, deduplicates) a raw pair list.
inline IndexSet make_index_set(std::vector<std::pair<int, int>> raw) {
  for (auto& [i, j] : raw) {
    if (i < 0 || j < 0) throw std::invalid_argument("IndexSet: negative index");
    if (i > j) std::swap(i, j);
  }
  std::sort(raw.begin(), raw.end());
  raw.erase(std::unique(raw.begin(), raw.end()), raw.end());
  return IndexSet{std::move(raw)};
}

// Keeps the entries of m whose (symmetric) positions lie in s, zeroes the
// rest. The diagonal is kept as a whole iff include_diagonal is set,
// independent of s.
inline Matrix project_set(const Matrix& m, const IndexSet& s, bool include_diagonal) {
  const int n = static_cast<int>(m.rows());
  if (m.cols() != n) throw std::invalid_argument("project_set: matrix must be square");
  Matrix out = Matrix::Zero(n, n);
  for (const auto& [i, j] : s.pairs) {
    if (i < 0 || j < 0 || i >= n || j >= n)
      throw std::out_of_range("project_set: index out of range");
    out(i, j) = m(i, j);
    out(j, i) = m(j, i);
  }
  if (include_diagonal) out.diagonal() = m.diagonal();
  return out;
}

inline Matrix project_set_complement(const Matrix& m, const IndexSet& s, bool include_diagonal) {
  return m - project_set(m, s, include_diagonal);
}

// Sampling/rescaling operator: keeps the diagonal verbatim, scales the
// off-diagonal entries whose positions lie in the set by 1/q, and zeroes all
// other off-diagonal entries. Diagonal pairs in the set are ignored (the
// diagonal term is already exact).
inline Matrix rescaled_restriction(const Matrix& m, const IndexSet& set, double q) {
  if (!(q > 0.0 && q <= 1.0)) throw std::invalid_argument("rescaled_restriction: q must be in (0,1]");
  const int n = static_cast<int>(m.rows());
  if (m.cols() != n) throw std::invalid_argument("rescaled_restriction: matrix must be square");
  Matrix out = Matrix::Zero(n, n);
  out.diagonal() = m.diagonal();
  const double inv_q = 1.0 / q;
  for (const auto& [i, j] : set.pairs) {
    if (i < 0 || j < 0 || i >= n || j >= n)
      throw std::out_of_range("rescaled_restriction: index out of range");
    if (i == j) continue;
    out(i, j) = inv_q * m(i, j);
    out(j, i) = inv_q * m(j, i);
  }
  return out;
}

// Index set of all observed pairs (off-diagonal part of the observed set).
inline IndexSet observed_set(const PartialGraph& g) {
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(static_cast<std::size_t>(g.observed_count()));
  for (const ObservedPair& p : g.observed_pairs()) pairs.emplace_back(p.i, p.j);
  return IndexSet{std::move(pairs)};  // already canonical: i < j, sorted
}

// Index set of observed disagreements of a clustering (support of B*).
inline IndexSet disagreement_set(const PartialGraph& g, const Clustering& c) {
  if (g.n() != c.n()) throw std::invalid_argument("disagreement_set: size mismatch");
  std::vector<std::pair<int, int>> pairs;
  for (const ObservedPair& p : g.observed_pairs())
    if (c.same(p.i, p.j) != p.edge) pairs.emplace_back(p.i, p.j);
  return IndexSet{std::move(pairs)};
}

// Index set of observed non-disagreements (off-diagonal part; consumers add
// the diagonal through the include_diagonal projection flag).
inline IndexSet agreement_set(const PartialGraph& g, const Clustering& c) {
  if (g.n() != c.n()) throw std::invalid_argument("agreement_set: size mismatch");
  std::vector<std::pair<int, int>> pairs;
  for (const ObservedPair& p : g.observed_pairs())
    if (c.same(p.i, p.j) == p.edge) pairs.emplace_back(p.i, p.j);
  return IndexSet{std::move(pairs)};
}

}  // namespace splitclust
