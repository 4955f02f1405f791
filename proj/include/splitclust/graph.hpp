#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace splitclust {

enum class PairState : std::int8_t { Unobserved = -1, NonEdge = 0, Edge = 1 };

struct ObservedPair {
  int i;
  int j;
  bool edge;
};

// A partially observed unweighted graph: each unordered node pair is either
// an observed edge, an observed non-edge, or unobserved. Pairs are keyed by
// i < j; self-pairs do not exist (the diagonal is handled by consumers,
// which treat it as observed and equal to one in I + A).
class PartialGraph {
 public:
  explicit PartialGraph(int n) : n_(n) {
    if (n < 1) throw std::invalid_argument("PartialGraph: node count must be >= 1");
    state_.setConstant(n, n, static_cast<std::int8_t>(PairState::Unobserved));
  }

  int n() const { return n_; }

  long total_pairs() const { return static_cast<long>(n_) * (n_ - 1) / 2; }

  PairState pair(int i, int j) const {
    check_pair(i, j);
    return static_cast<PairState>(state_(i, j));
  }

  bool is_observed(int i, int j) const { return pair(i, j) != PairState::Unobserved; }

  // Records an observation for i < j. Throws on self-pairs, out-of-range
  // indices, reversed order, or pairs already observed.
  void observe(int i, int j, bool edge) {
    if (i == j) throw std::invalid_argument("PartialGraph: self-pair");
    if (i < 0 || j < 0 || i >= n_ || j >= n_)
      throw std::invalid_argument("PartialGraph: node index out of range");
    if (i > j) throw std::invalid_argument("PartialGraph: pair indices must satisfy i < j");
    if (state_(i, j) != static_cast<std::int8_t>(PairState::Unobserved))
      throw std::invalid_argument("PartialGraph: duplicate pair");
    const std::int8_t s = edge ? 1 : 0;
    state_(i, j) = s;
    state_(j, i) = s;
    ++observed_count_;
  }

  long observed_count() const { return observed_count_; }

  std::vector<ObservedPair> observed_pairs() const {
    std::vector<ObservedPair> out;
    out.reserve(static_cast<std::size_t>(observed_count_));
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j)
        if (state_(i, j) >= 0) out.push_back({i, j, state_(i, j) == 1});
    return out;
  }

  void fill_unobserved_with_nonedges() {
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j)
        if (state_(i, j) < 0) observe(i, j, false);
  }

  bool operator==(const PartialGraph& other) const {
    return n_ == other.n_ && state_ == other.state_;
  }

 private:
  void check_pair(int i, int j) const {
    if (i == j) throw std::invalid_argument("PartialGraph: self-pair");
    if (i < 0 || j < 0 || i >= n_ || j >= n_)
      throw std::invalid_argument("PartialGraph: node index out of range");
  }

  int n_;
  long observed_count_ = 0;
  Eigen::Matrix<std::int8_t, Eigen::Dynamic, Eigen::Dynamic> state_;
};

// Fraction of node pairs that are observed.
inline double observed_rate(const PartialGraph& g) {
  const long total = g.total_pairs();
  return total == 0 ? 1.0 : static_cast<double>(g.observed_count()) / static_cast<double>(total);
}

namespace detail {

[[noreturn]] inline void parse_fail(long line, const std::string& what) {
  throw std::runtime_error("graph parse error at line " + std::to_string(line) + ": " + what);
}

}  // namespace detail

// Graph file format (UTF-8 text):
//   n <N>              header, mandatory first directive
//   fully_observed     optional; unlisted pairs become observed non-edges
//   e <i> <j> <bit>    observation with 0 <= i < j < N and bit in {0,1}
//   # ...              comment
inline PartialGraph parse_graph(std::istream& in) {
  std::string line;
  long lineno = 0;
  bool have_n = false;
  bool fully_observed = false;
  int n = 0;
  PartialGraph g(1);

  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;  // blank line
    if (tok[0] == '#') continue;

    if (!have_n) {
      if (tok != "n") detail::parse_fail(lineno, "expected header 'n <N>'");
      if (!(ls >> n) || n < 1) detail::parse_fail(lineno, "invalid node count");
      std::string extra;
      if (ls >> extra) detail::parse_fail(lineno, "trailing tokens after node count");
      g = PartialGraph(n);
      have_n = true;
      continue;
    }

    if (tok == "fully_observed") {
      std::string extra;
      if (ls >> extra) detail::parse_fail(lineno, "trailing tokens after fully_observed");
      fully_observed = true;
      continue;
    }

    if (tok == "e") {
      int i = 0, j = 0, bit = 0;
      if (!(ls >> i >> j >> bit)) detail::parse_fail(lineno, "malformed edge line");
      std::string extra;
      if (ls >> extra) detail::parse_fail(lineno, "trailing tokens on edge line");
      if (bit != 0 && bit != 1) detail::parse_fail(lineno, "bit must be 0 or 1");
      if (i == j) detail::parse_fail(lineno, "self-pair");
      if (i < 0 || j < 0 || i >= n || j >= n) detail::parse_fail(lineno, "node index out of range");
      if (i > j) detail::parse_fail(lineno, "pair indices must satisfy i < j");
      if (g.is_observed(i, j)) detail::parse_fail(lineno, "duplicate pair");
      g.observe(i, j, bit == 1);
      continue;
    }

    detail::parse_fail(lineno, "unknown directive '" + tok + "'");
  }

  if (!have_n) throw std::runtime_error("graph parse error: missing 'n <N>' header");
  if (fully_observed) g.fill_unobserved_with_nonedges();
  return g;
}

inline PartialGraph parse_graph(const std::string& text) {
  std::istringstream in(text);
  return parse_graph(in);
}

inline PartialGraph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph file: " + path);
  return parse_graph(in);
}

inline void write_graph(std::ostream& out, const PartialGraph& g) {
  out << "n " << g.n() << "\n";
  const bool full = g.observed_count() == g.total_pairs();
  if (full) out << "fully_observed\n";
  for (const ObservedPair& p : g.observed_pairs()) {
    if (full && !p.edge) continue;  // implied by fully_observed
    out << "e " << p.i << " " << p.j << " " << (p.edge ? 1 : 0) << "\n";
  }
}

inline void save_graph(const std::string& path, const PartialGraph& g) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write graph file: " + path);
  write_graph(out, g);
}

}  // namespace splitclust
