#pragma once

// Small deterministic graph generators for tests and the acceptance suite.

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>
#include <vector>

#include "caper/alignment.hpp"
#include "caper/graph.hpp"
#include "caper/random.hpp"

namespace caper::testing {

inline Graph make_graph(std::size_t n, std::vector<Edge> edges) { return Graph::from_edges(n, edges); }

inline Graph path_graph(std::size_t n) {
  std::vector<Edge> e;
  for (NodeId u = 0; u + 1 < n; ++u) e.push_back({u, u + 1, 1.0});
  return make_graph(n, e);
}

inline Graph cycle_graph(std::size_t n) {
  std::vector<Edge> e;
  for (NodeId u = 0; u < n; ++u) e.push_back({u, static_cast<NodeId>((u + 1) % n), 1.0});
  return make_graph(n, e);
}

inline Graph star_graph(std::size_t leaves) {
  std::vector<Edge> e;
  for (NodeId u = 1; u <= leaves; ++u) e.push_back({0, u, 1.0});
  return make_graph(leaves + 1, e);
}

inline Graph complete_graph(std::size_t n) {
  std::vector<Edge> e;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v) e.push_back({u, v, 1.0});
  return make_graph(n, e);
}

// G(n, m) with m = round(n * avg_degree / 2) distinct non-loop edges.
inline Graph erdos_renyi(std::size_t n, double avg_degree, std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t max_edges = n * (n - 1) / 2;
  const std::size_t m = std::min(max_edges, static_cast<std::size_t>(std::llround(n * avg_degree / 2.0)));
  std::set<std::pair<NodeId, NodeId>> chosen;
  while (chosen.size() < m) {
    auto u = static_cast<NodeId>(rng.below(n));
    auto v = static_cast<NodeId>(rng.below(n));
    if (u == v) continue;
    chosen.insert({std::min(u, v), std::max(u, v)});
  }
  std::vector<Edge> e;
  for (const auto& [u, v] : chosen) e.push_back({u, v, 1.0});
  return make_graph(n, e);
}

// Random weighted graph with optional self-loops, weights in [0.5, 3).
inline Graph random_weighted(std::size_t n, double avg_degree, bool loops, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Edge> e;
  const auto m = static_cast<std::size_t>(std::llround(n * avg_degree / 2.0));
  for (std::size_t k = 0; k < m; ++k) {
    auto u = static_cast<NodeId>(rng.below(n));
    auto v = static_cast<NodeId>(rng.below(n));
    if (u == v && !loops) continue;
    e.push_back({u, v, 0.5 + 2.5 * rng.unit()});
  }
  return make_graph(n, e);
}

// Random d-regular simple graph by the pairing model, restarting on collisions.
inline Graph random_regular(std::size_t n, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  for (;;) {
    std::vector<NodeId> stubs;
    for (NodeId u = 0; u < n; ++u)
      for (std::size_t k = 0; k < d; ++k) stubs.push_back(u);
    for (std::size_t i = stubs.size(); i > 1; --i) std::swap(stubs[i - 1], stubs[rng.below(i)]);
    std::set<std::pair<NodeId, NodeId>> edges;
    bool ok = true;
    for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
      const NodeId u = std::min(stubs[i], stubs[i + 1]);
      const NodeId v = std::max(stubs[i], stubs[i + 1]);
      if (u == v || !edges.insert({u, v}).second) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    std::vector<Edge> e;
    for (const auto& [u, v] : edges) e.push_back({u, v, 1.0});
    return make_graph(n, e);
  }
}

// Preferential attachment: each new node links to m distinct earlier nodes.
inline Graph barabasi_albert(std::size_t n, std::size_t m, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<NodeId> targets;  // one entry per edge endpoint
  std::vector<Edge> e;
  for (NodeId u = 0; u <= m; ++u)
    for (NodeId v = u + 1; v <= m; ++v) {
      e.push_back({u, v, 1.0});
      targets.push_back(u);
      targets.push_back(v);
    }
  for (NodeId u = static_cast<NodeId>(m + 1); u < n; ++u) {
    std::set<NodeId> picked;
    while (picked.size() < m) picked.insert(targets[rng.below(targets.size())]);
    for (NodeId v : picked) {
      e.push_back({u, v, 1.0});
      targets.push_back(u);
      targets.push_back(v);
    }
  }
  return make_graph(n, e);
}

// Chung-Lu graph with power-law expected degrees: heterogeneous degree structure.
inline Graph chung_lu_powerlaw(std::size_t n, double avg_degree, double exponent, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> w(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = std::pow(static_cast<double>(i + 1), -1.0 / (exponent - 1.0));
    total += w[i];
  }
  for (auto& x : w) x *= avg_degree * static_cast<double>(n) / total;
  total = avg_degree * static_cast<double>(n);
  std::vector<Edge> e;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v)
      if (rng.unit() < std::min(1.0, w[u] * w[v] / total)) e.push_back({u, v, 1.0});
  return make_graph(n, e);
}

inline Graph relabel(const Graph& g, const std::vector<NodeId>& perm) {
  std::vector<Edge> e;
  for (const auto& x : g.edges()) e.push_back({perm[x.u], perm[x.v], x.w});
  return make_graph(g.num_nodes(), e);
}

// Copy of g with every weight rounded to a positive multiple of 1/4. Sums of
// such weights are exact in any order, so dense oracles can be compared with ==.
inline Graph quarter_weights(const Graph& g) {
  std::vector<Edge> e;
  for (auto x : g.edges()) e.push_back({x.u, x.v, std::max(0.25, std::round(4.0 * x.w) / 4.0)});
  return make_graph(g.num_nodes(), e);
}

// Random alignment with up to per_row distinct columns per row, scores in [0.05, 1.05).
inline AlignmentMatrix random_alignment(std::size_t n1, std::size_t n2, std::size_t per_row, Rng& rng) {
  std::vector<AlignmentTriplet> t;
  for (NodeId i = 0; i < n1; ++i) {
    std::set<NodeId> cols;
    for (std::size_t k = 0; k < per_row; ++k) cols.insert(static_cast<NodeId>(rng.below(n2)));
    for (NodeId j : cols) t.push_back({i, j, 0.05 + rng.unit()});
  }
  return AlignmentMatrix::from_triplets(n1, n2, t);
}

}  // namespace caper::testing
