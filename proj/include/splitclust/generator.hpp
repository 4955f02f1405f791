#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "splitclust/clustering.hpp"
#include "splitclust/graph.hpp"
#include "splitclust/rng.hpp"

namespace splitclust {

enum class NoiseMode { BernoulliFlips, FixedPerNode };

// Planted-partition model: ideal cliques from cluster_sizes, then either
// independent pair flips with probability tau followed by independent
// observation with probability p0 (BernoulliFlips), or exactly b
// disagreements per node on a fully observed graph (FixedPerNode).
struct GeneratorParams {
  std::vector<int> cluster_sizes;
  double tau = 0.0;
  double p0 = 1.0;
  std::uint64_t seed = 0;
  NoiseMode mode = NoiseMode::BernoulliFlips;
  int disagreements_per_node = 0;  // the per-node budget b in FixedPerNode mode

  int n() const { return std::accumulate(cluster_sizes.begin(), cluster_sizes.end(), 0); }

  void validate() const {
    if (cluster_sizes.empty()) throw std::invalid_argument("GeneratorParams: no cluster sizes");
    for (int s : cluster_sizes)
      if (s < 1) throw std::invalid_argument("GeneratorParams: cluster sizes must be >= 1");
    if (!(tau >= 0.0 && tau < 1.0)) throw std::invalid_argument("GeneratorParams: tau must be in [0,1)");
    if (!(p0 > 0.0 && p0 <= 1.0)) throw std::invalid_argument("GeneratorParams: p0 must be in (0,1]");
    if (mode == NoiseMode::FixedPerNode) {
      const long total = static_cast<long>(n()) * disagreements_per_node;
      if (disagreements_per_node < 0)
        throw std::invalid_argument("GeneratorParams: negative per-node budget");
      if (disagreements_per_node >= n())
        throw std::invalid_argument("GeneratorParams: per-node budget must be < n");
      if (total % 2 != 0)
        throw std::invalid_argument(
            "GeneratorParams: infeasible per-node budget (n * b must be even)");
    }
  }
};

struct Instance {
  PartialGraph graph;
  Clustering planted;
};

namespace detail {

// Uniform-ish b-regular pairing via stub matching. Collisions (self-pairs,
// duplicate pairs) are repaired by random pair switches; full reshuffles are
// the fallback when a repair stalls.
inline std::vector<std::pair<int, int>> regular_pairing(int n, int b, Rng& rng) {
  std::vector<int> stubs;
  stubs.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(b));
  for (int i = 0; i < n; ++i) stubs.insert(stubs.end(), static_cast<std::size_t>(b), i);

  const auto key = [](int u, int v) {
    return std::make_pair(std::min(u, v), std::max(u, v));
  };

  for (int attempt = 0; attempt < 200; ++attempt) {
    rng.shuffle(stubs);
    std::vector<std::pair<int, int>> edges;
    edges.reserve(stubs.size() / 2);
    std::map<std::pair<int, int>, int> count;
    for (std::size_t s = 0; s + 1 < stubs.size(); s += 2) {
      edges.emplace_back(stubs[s], stubs[s + 1]);
      if (stubs[s] != stubs[s + 1]) ++count[key(stubs[s], stubs[s + 1])];
    }

    const auto bad = [&](const std::pair<int, int>& e) {
      return e.first == e.second || count[key(e.first, e.second)] > 1;
    };

    bool stalled = false;
    long steps = 0;
    const long step_limit = 200L * static_cast<long>(edges.size()) + 1000;
    for (std::size_t a = 0; a < edges.size();) {
      if (!bad(edges[a])) {
        ++a;
        continue;
      }
      if (++steps > step_limit) {
        stalled = true;
        break;
      }
      const std::size_t r = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(edges.size()) - 1));
      if (r == a) continue;
      auto [u, v] = edges[a];
      auto [x, y] = edges[r];
      if (rng.bernoulli(0.5)) std::swap(x, y);
      // proposed switch: (u,x) and (v,y)
      if (u == x || v == y) continue;
      auto remove = [&](int p, int q) {
        if (p != q) --count[key(p, q)];
      };
      remove(u, v);
      remove(edges[r].first, edges[r].second);
      if (count[key(u, x)] > 0 || count[key(v, y)] > 0) {
        if (u != v) ++count[key(u, v)];
        if (edges[r].first != edges[r].second) ++count[key(edges[r].first, edges[r].second)];
        continue;
      }
      ++count[key(u, x)];
      ++count[key(v, y)];
      edges[a] = {u, x};
      edges[r] = {v, y};
      a = 0;  // earlier pairs may have been touched
    }
    if (!stalled) return edges;
  }
  throw std::runtime_error("regular_pairing: could not realize the per-node budget");
}

}  // namespace detail

inline Instance generate_instance(const GeneratorParams& params) {
  params.validate();
  const int n = params.n();
  Clustering planted = Clustering::from_blocks(params.cluster_sizes);
  PartialGraph g(n);
  Rng rng(params.seed);

  if (params.mode == NoiseMode::BernoulliFlips) {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        bool edge = planted.same(i, j);
        if (rng.bernoulli(params.tau)) edge = !edge;
        if (rng.bernoulli(params.p0)) g.observe(i, j, edge);
      }
    }
    return {std::move(g), std::move(planted)};
  }

  // FixedPerNode: fully observed; flip exactly the matched pairs
  std::vector<std::pair<int, int>> flips;
  if (params.disagreements_per_node > 0)
    flips = detail::regular_pairing(n, params.disagreements_per_node, rng);
  std::vector<std::vector<bool>> flip(static_cast<std::size_t>(n),
                                      std::vector<bool>(static_cast<std::size_t>(n), false));
  for (const auto& [u, v] : flips)
    flip[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] =
        flip[static_cast<std::size_t>(v)][static_cast<std::size_t>(u)] = true;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      bool edge = planted.same(i, j);
      if (flip[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) edge = !edge;
      g.observe(i, j, edge);
    }
  }
  return {std::move(g), std::move(planted)};
}

// Visits every partition of {0..n-1} as a restricted-growth label string
// (labels[i] <= 1 + max(labels[0..i-1])), which enumerates each set
// partition exactly once.
inline void for_each_partition(int n, const std::function<void(const std::vector<int>&)>& fn) {
  if (n < 1) throw std::invalid_argument("for_each_partition: n must be >= 1");
  std::vector<int> labels(static_cast<std::size_t>(n), 0);
  std::vector<int> prefix_max(static_cast<std::size_t>(n), 0);
  fn(labels);
  while (true) {
    int i = n - 1;
    while (i > 0 && labels[static_cast<std::size_t>(i)] ==
                        prefix_max[static_cast<std::size_t>(i - 1)] + 1)
      --i;
    if (i == 0) return;
    ++labels[static_cast<std::size_t>(i)];
    prefix_max[static_cast<std::size_t>(i)] =
        std::max(prefix_max[static_cast<std::size_t>(i - 1)], labels[static_cast<std::size_t>(i)]);
    for (int j = i + 1; j < n; ++j) {
      labels[static_cast<std::size_t>(j)] = 0;
      prefix_max[static_cast<std::size_t>(j)] = prefix_max[static_cast<std::size_t>(j - 1)];
    }
    fn(labels);
  }
}

// Exact disagreement minimizer by exhaustive partition enumeration. Ties are
// broken by enumeration order. Guarded to n <= 12.
inline std::pair<Clustering, long> brute_force_min(const PartialGraph& g) {
  if (g.n() > 12) throw std::invalid_argument("brute_force_min: n must be <= 12");
  const std::vector<ObservedPair> pairs = g.observed_pairs();
  std::vector<int> best_labels(static_cast<std::size_t>(g.n()), 0);
  long best = std::numeric_limits<long>::max();
  for_each_partition(g.n(), [&](const std::vector<int>& labels) {
    long count = 0;
    for (const ObservedPair& p : pairs) {
      const bool same = labels[static_cast<std::size_t>(p.i)] == labels[static_cast<std::size_t>(p.j)];
      if (same != p.edge) ++count;
    }
    if (count < best) {
      best = count;
      best_labels = labels;
    }
  });
  return {Clustering(best_labels), best};
}

}  // namespace splitclust
