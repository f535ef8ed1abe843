#include "caper/coarsen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <tuple>

#include "caper/error.hpp"

namespace caper {

std::vector<std::vector<NodeId>> Assignment::members() const {
  std::vector<std::vector<NodeId>> out(num_coarse);
  for (std::size_t u = 0; u < fine_to_coarse.size(); ++u) out[fine_to_coarse[u]].push_back(static_cast<NodeId>(u));
  return out;
}

Assignment Assignment::identity(std::size_t n) {
  Assignment a;
  a.fine_to_coarse.resize(n);
  for (std::size_t u = 0; u < n; ++u) a.fine_to_coarse[u] = static_cast<NodeId>(u);
  a.num_coarse = n;
  return a;
}

void Assignment::validate() const {
  if (num_coarse > num_fine()) throw ValidationError("assignment has more supernodes than fine nodes");
  std::vector<int> size(num_coarse, 0);
  for (NodeId c : fine_to_coarse) {
    if (c >= num_coarse) throw ValidationError("assignment target out of range");
    ++size[c];
  }
  for (int s : size)
    if (s < 1 || s > 2) throw ValidationError("supernode with " + std::to_string(s) + " members");
}

double normalized_edge_weight(const Graph& g, NodeId u, NodeId v) {
  if (u >= g.num_nodes() || v >= g.num_nodes()) throw ValidationError("node out of range");
  if (u == v) throw ValidationError("normalized weight is undefined for a self-loop");
  const double w = g.weight(u, v);
  if (w <= 0.0) throw ValidationError("(" + std::to_string(u) + "," + std::to_string(v) + ") is not an edge");
  double du = 0.0, dv = 0.0;
  for (double x : g.neighbor_weights(u)) du += x;
  for (double x : g.neighbor_weights(v)) dv += x;
  return w / std::sqrt(du * dv);
}

namespace {

// Color refinement: a node's color is refined by the sorted multiset of
// (edge weight, neighbor color) until the partition stops splitting. Colors
// are ranks of sorted signatures, so they do not depend on node ids.
std::vector<std::uint32_t> refined_colors(const Graph& g, const std::vector<double>& degree) {
  const std::size_t n = g.num_nodes();
  std::vector<std::uint32_t> color(n, 0);
  {
    std::vector<double> distinct(degree);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    for (NodeId u = 0; u < n; ++u)
      color[u] = static_cast<std::uint32_t>(std::lower_bound(distinct.begin(), distinct.end(), degree[u]) -
                                            distinct.begin());
  }
  using Signature = std::pair<std::uint32_t, std::vector<std::pair<double, std::uint32_t>>>;
  std::vector<Signature> sig(n);
  std::vector<NodeId> order(n);
  std::size_t classes = 0;
  for (;;) {
    for (NodeId u = 0; u < n; ++u) {
      sig[u].first = color[u];
      auto& nb = sig[u].second;
      nb.clear();
      const auto nbrs = g.neighbors(u);
      const auto ws = g.neighbor_weights(u);
      for (std::size_t k = 0; k < nbrs.size(); ++k) nb.emplace_back(ws[k], color[nbrs[k]]);
      std::sort(nb.begin(), nb.end());
    }
    for (NodeId u = 0; u < n; ++u) order[u] = u;
    std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) { return sig[a] < sig[b]; });
    std::size_t count = 0;
    for (std::size_t k = 0; k < n; ++k) {
      if (k > 0 && sig[order[k]] != sig[order[k - 1]]) ++count;
      color[order[k]] = static_cast<std::uint32_t>(count);
    }
    if (n > 0) ++count;
    if (count == classes) break;
    classes = count;
  }
  return color;
}

}  // namespace

std::vector<MergePair> nhem_match(const Graph& g) {
  // Equal scores are ordered by endpoint degrees, endpoint neighbor-degree
  // sums and refined colors, and only then by ids, so that isomorphic graphs
  // under any labeling mostly pick corresponding pairs.
  struct Candidate {
    double score;
    double deg_lo, deg_hi;
    double nbr_lo, nbr_hi;
    std::uint32_t color_lo, color_hi;
    NodeId u;  // u < v
    NodeId v;
  };
  const auto degree = degree_vector(g);
  std::vector<double> nbr_sum(g.num_nodes(), 0.0);
  for (NodeId u = 0; u < g.num_nodes(); ++u)
    for (NodeId x : g.neighbors(u)) nbr_sum[u] += degree[x];
  const auto color = refined_colors(g, degree);

  std::vector<Candidate> candidates;
  candidates.reserve(g.num_entries() / 2);
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    const auto nbrs = g.neighbors(u);
    const auto ws = g.neighbor_weights(u);
    for (std::size_t k = 0; k < nbrs.size(); ++k)
      if (nbrs[k] > u) {
        const NodeId v = nbrs[k];
        candidates.push_back({ws[k] / std::sqrt(degree[u] * degree[v]), std::min(degree[u], degree[v]),
                              std::max(degree[u], degree[v]), std::min(nbr_sum[u], nbr_sum[v]),
                              std::max(nbr_sum[u], nbr_sum[v]), std::min(color[u], color[v]),
                              std::max(color[u], color[v]), u, v});
      }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score > b.score;
    return std::tie(a.deg_lo, a.deg_hi, a.nbr_lo, a.nbr_hi, a.color_lo, a.color_hi, a.u, a.v) <
           std::tie(b.deg_lo, b.deg_hi, b.nbr_lo, b.nbr_hi, b.color_lo, b.color_hi, b.u, b.v);
  });

  std::vector<bool> matched(g.num_nodes(), false);
  std::vector<MergePair> pairs;
  for (const auto& c : candidates) {
    if (matched[c.u] || matched[c.v]) continue;
    matched[c.u] = matched[c.v] = true;
    pairs.emplace_back(c.u, c.v);
  }
  return pairs;
}

std::pair<Graph, Assignment> contract(const Graph& g, std::span<const MergePair> pairs) {
  const std::size_t n = g.num_nodes();
  std::vector<NodeId> partner(n, kNoNode);
  for (const auto& [a, b] : pairs) {
    if (a >= n || b >= n) throw ValidationError("merge pair out of range");
    if (a == b) throw ValidationError("merge pair joins a node with itself");
    if (partner[a] != kNoNode || partner[b] != kNoNode)
      throw ValidationError("overlapping merge pairs at (" + std::to_string(a) + "," + std::to_string(b) + ")");
    partner[a] = b;
    partner[b] = a;
  }

  Assignment assign;
  assign.fine_to_coarse.assign(n, kNoNode);
  NodeId next = 0;
  for (NodeId u = 0; u < n; ++u) {
    if (assign.fine_to_coarse[u] != kNoNode) continue;
    assign.fine_to_coarse[u] = next;
    if (partner[u] != kNoNode) assign.fine_to_coarse[partner[u]] = next;
    ++next;
  }
  assign.num_coarse = next;

  // Each undirected fine edge is visited once (u <= v) so an internal edge
  // lands on the supernode loop exactly once.
  std::vector<Edge> coarse;
  coarse.reserve(g.num_entries() / 2 + n);
  for (NodeId u = 0; u < n; ++u) {
    const auto nbrs = g.neighbors(u);
    const auto ws = g.neighbor_weights(u);
    for (std::size_t k = 0; k < nbrs.size(); ++k)
      if (nbrs[k] >= u) coarse.push_back({assign.fine_to_coarse[u], assign.fine_to_coarse[nbrs[k]], ws[k]});
  }
  return {Graph::from_edges(assign.num_coarse, coarse), std::move(assign)};
}

Hierarchy build_hierarchy(const Graph& g, std::size_t levels) {
  Hierarchy h;
  h.graphs.push_back(g);
  for (std::size_t l = 0; l < levels; ++l) {
    const auto pairs = nhem_match(h.graphs.back());
    if (pairs.empty()) break;
    auto [coarse, assign] = contract(h.graphs.back(), pairs);
    h.graphs.push_back(std::move(coarse));
    h.assignments.push_back(std::move(assign));
  }
  return h;
}

void save_hierarchy(const std::string& dir, const Hierarchy& h, std::span<const std::string> labels) {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  if (!fs::is_directory(root)) throw IoError("'" + dir + "' is not a directory");

  std::ofstream manifest(root / "manifest.txt");
  if (!manifest) throw IoError("cannot write manifest in '" + dir + "'");
  manifest << "# level\tnodes\tedges\tgraph\tassignment\n";
  for (std::size_t l = 0; l < h.graphs.size(); ++l) {
    const std::string graph_file = "level_" + std::to_string(l) + ".edges";
    save_edge_list((root / graph_file).string(), h.graphs[l]);
    std::string assign_file = "-";
    if (l > 0) {
      assign_file = "assign_" + std::to_string(l) + ".tsv";
      std::ofstream out(root / assign_file);
      if (!out) throw IoError("cannot write " + assign_file);
      const auto& a = h.assignments[l - 1];
      for (std::size_t u = 0; u < a.num_fine(); ++u) out << u << '\t' << a.fine_to_coarse[u] << '\n';
    }
    manifest << l << '\t' << h.graphs[l].num_nodes() << '\t' << h.graphs[l].num_edges() << '\t' << graph_file
             << '\t' << assign_file << '\n';
  }
  if (!labels.empty()) {
    std::ofstream out(root / "labels.tsv");
    if (!out) throw IoError("cannot write labels.tsv");
    for (std::size_t u = 0; u < labels.size(); ++u) out << u << '\t' << labels[u] << '\n';
  }
  if (!manifest) throw IoError("write failure on manifest");
}

}  // namespace caper
