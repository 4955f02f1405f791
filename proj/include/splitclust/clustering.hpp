#pragma once

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "splitclust/graph.hpp"
#include "splitclust/matrix.hpp"
#include "splitclust/tolerances.hpp"

namespace splitclust {

// A partition of nodes 0..n-1 into non-empty clusters. Labels are normalized
// to 0..p-1 in order of first node appearance, so equal partitions compare
// equal regardless of the ids they were built with.
class Clustering {
 public:
  explicit Clustering(const std::vector<int>& raw_labels) {
    if (raw_labels.empty()) throw std::invalid_argument("Clustering: empty label vector");
    labels_.reserve(raw_labels.size());
    std::map<int, int> remap;
    for (int raw : raw_labels) {
      auto [it, inserted] = remap.emplace(raw, static_cast<int>(remap.size()));
      labels_.push_back(it->second);
      if (inserted)
        sizes_.push_back(1);
      else
        ++sizes_[static_cast<std::size_t>(it->second)];
    }
  }

  // Contiguous blocks of the given sizes: nodes 0..s0-1 in cluster 0, etc.
  static Clustering from_blocks(const std::vector<int>& block_sizes) {
    std::vector<int> labels;
    for (std::size_t c = 0; c < block_sizes.size(); ++c) {
      if (block_sizes[c] < 1) throw std::invalid_argument("Clustering: block size must be >= 1");
      labels.insert(labels.end(), static_cast<std::size_t>(block_sizes[c]), static_cast<int>(c));
    }
    return Clustering(labels);
  }

  int n() const { return static_cast<int>(labels_.size()); }
  int cluster_count() const { return static_cast<int>(sizes_.size()); }
  int label(int i) const { return labels_.at(static_cast<std::size_t>(i)); }
  const std::vector<int>& labels() const { return labels_; }
  int cluster_size(int c) const { return sizes_.at(static_cast<std::size_t>(c)); }
  bool same(int i, int j) const { return label(i) == label(j); }

  std::vector<int> sizes_descending() const {
    std::vector<int> s = sizes_;
    std::sort(s.begin(), s.end(), std::greater<int>());
    return s;
  }

  int k_min() const { return *std::min_element(sizes_.begin(), sizes_.end()); }
  int k_max() const { return *std::max_element(sizes_.begin(), sizes_.end()); }

  friend bool operator==(const Clustering& a, const Clustering& b) {
    return a.labels_ == b.labels_;
  }

 private:
  std::vector<int> labels_;
  std::vector<int> sizes_;
};

// Number of observed pairs contradicting the clustering: missing edges
// within clusters plus present edges across clusters. Unobserved pairs are
// never counted.
inline long count_disagreements(const PartialGraph& g, const Clustering& c) {
  if (g.n() != c.n()) throw std::invalid_argument("count_disagreements: size mismatch");
  long count = 0;
  for (int i = 0; i < g.n(); ++i) {
    for (int j = i + 1; j < g.n(); ++j) {
      const PairState s = g.pair(i, j);
      if (s == PairState::Unobserved) continue;
      const bool edge = s == PairState::Edge;
      if (c.same(i, j) ? !edge : edge) ++count;
    }
  }
  return count;
}

// The cluster matrix of a partition: K*_{ij} = 1 iff i and j share a cluster
// (diagonal included), 0 elsewhere.
inline Matrix build_kstar(const Clustering& c) {
  const int n = c.n();
  Matrix k = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    k(i, i) = 1.0;
    for (int j = i + 1; j < n; ++j)
      if (c.same(i, j)) k(i, j) = k(j, i) = 1.0;
  }
  return k;
}

// The observed-disagreement matrix of a clustering: -1 at observed missing
// within-cluster edges, +1 at observed cross-cluster edges, 0 elsewhere.
// Equals I + A - K* restricted to the observed entries, with the diagonal
// treated as observed and equal to one.
inline Matrix build_bstar(const PartialGraph& g, const Clustering& c) {
  if (g.n() != c.n()) throw std::invalid_argument("build_bstar: size mismatch");
  const int n = g.n();
  Matrix b = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const PairState s = g.pair(i, j);
      if (s == PairState::Unobserved) continue;
      const bool edge = s == PairState::Edge;
      double v = 0.0;
      if (c.same(i, j) && !edge) v = -1.0;
      if (!c.same(i, j) && edge) v = 1.0;
      b(i, j) = b(j, i) = v;
    }
  }
  return b;
}

struct ValidityReport {
  bool valid = false;
  std::optional<Clustering> clustering;
  double max_deviation = 0.0;
};

// Tests whether a symmetric matrix rounds to the cluster matrix of some
// partition. Each entry is rounded to the nearest of {0,1}; the result is
// valid iff every rounded entry is within tol of the original, the rounded
// diagonal is all ones, and the rounded ones-relation is transitive (checked
// through connected components: within a component all pairs must round to
// one). On success the component partition is returned.
inline ValidityReport check_validity(const Matrix& k, double tol = kTol.validity) {
  require_symmetric(k);
  if (!(tol > 0.0 && tol < 0.5)) throw std::invalid_argument("check_validity: tol must be in (0, 0.5)");
  const int n = static_cast<int>(k.rows());

  ValidityReport report;
  bool rounding_ok = true;
  Eigen::MatrixXi rounded(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int r = k(i, j) >= 0.5 ? 1 : 0;
      rounded(i, j) = r;
      const double dev = std::abs(k(i, j) - static_cast<double>(r));
      report.max_deviation = std::max(report.max_deviation, dev);
      if (dev > tol) rounding_ok = false;
    }
  }
  if (!rounding_ok) return report;

  for (int i = 0; i < n; ++i)
    if (rounded(i, i) != 1) return report;

  // components of the rounded ones-relation
  std::vector<int> comp(static_cast<std::size_t>(n), -1);
  int next = 0;
  for (int s = 0; s < n; ++s) {
    if (comp[static_cast<std::size_t>(s)] >= 0) continue;
    std::vector<int> stack{s};
    comp[static_cast<std::size_t>(s)] = next;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int v = 0; v < n; ++v) {
        if (v != u && rounded(u, v) == 1 && comp[static_cast<std::size_t>(v)] < 0) {
          comp[static_cast<std::size_t>(v)] = next;
          stack.push_back(v);
        }
      }
    }
    ++next;
  }

  // transitivity: membership in one component must imply a rounded one
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if ((comp[static_cast<std::size_t>(i)] == comp[static_cast<std::size_t>(j)]) !=
          (rounded(i, j) == 1))
        return report;

  report.valid = true;
  report.clustering = Clustering(comp);
  return report;
}

// Clustering file format: one "<node> <cluster_id>" line per node, any
// order, complete; '#' starts a comment.
inline Clustering parse_clustering(std::istream& in) {
  std::string line;
  long lineno = 0;
  std::map<int, int> by_node;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first[0] == '#') continue;
    int node = 0, cluster = 0;
    std::istringstream reparse(line);
    if (!(reparse >> node >> cluster))
      throw std::runtime_error("clustering parse error at line " + std::to_string(lineno) +
                               ": expected '<node> <cluster_id>'");
    std::string extra;
    if (reparse >> extra)
      throw std::runtime_error("clustering parse error at line " + std::to_string(lineno) +
                               ": trailing tokens");
    if (node < 0)
      throw std::runtime_error("clustering parse error at line " + std::to_string(lineno) +
                               ": negative node id");
    if (!by_node.emplace(node, cluster).second)
      throw std::runtime_error("clustering parse error at line " + std::to_string(lineno) +
                               ": duplicate node " + std::to_string(node));
  }
  if (by_node.empty()) throw std::runtime_error("clustering parse error: empty file");
  const int n = static_cast<int>(by_node.size());
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (const auto& [node, cluster] : by_node) {
    if (node >= n)
      throw std::runtime_error("clustering parse error: node ids must cover 0.." +
                               std::to_string(n - 1) + " exactly (found " + std::to_string(node) +
                               ")");
    labels[static_cast<std::size_t>(node)] = cluster;
  }
  return Clustering(labels);
}

inline Clustering load_clustering(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open clustering file: " + path);
  return parse_clustering(in);
}

inline void write_clustering(std::ostream& out, const Clustering& c,
                             const std::string& header = "") {
  if (!header.empty()) out << "# " << header << "\n";
  for (int i = 0; i < c.n(); ++i) out << i << " " << c.label(i) << "\n";
}

inline void save_clustering(const std::string& path, const Clustering& c,
                            const std::string& header = "") {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write clustering file: " + path);
  write_clustering(out, c, header);
}

}  // namespace splitclust
