#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace caper {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

struct Edge {
  NodeId u;
  NodeId v;
  double w = 1.0;
};

/// Weighted undirected graph in CSR form.
///
/// Every undirected edge (u,v) with u != v is stored twice, once per row; a
/// self-loop (u,u) is stored once. Rows are sorted by column and carry no
/// duplicates, and all stored weights are strictly positive. Instances are
/// immutable once built.
class Graph {
 public:
  Graph() = default;
  explicit Graph(std::size_t num_nodes) : offsets_(num_nodes + 1, 0) {}

  // Builds the canonical graph from an undirected edge list. Each input edge
  // is symmetrized; repeated (u,v) pairs in either orientation are summed.
  // Zero-weight edges are dropped. Throws ValidationError on an out-of-range
  // endpoint or a negative / non-finite weight.
  static Graph from_edges(std::size_t num_nodes, std::span<const Edge> edges);

  // Wraps raw CSR arrays after checking every invariant.
  static Graph from_csr(std::vector<std::size_t> row_offsets, std::vector<NodeId> col_indices,
                        std::vector<double> weights);

  std::size_t num_nodes() const noexcept { return offsets_.size() - 1; }
  // Stored (directed) entries: 2 per edge, 1 per self-loop.
  std::size_t num_entries() const noexcept { return cols_.size(); }
  // Undirected edges including self-loops.
  std::size_t num_edges() const noexcept;

  std::span<const NodeId> neighbors(NodeId u) const noexcept {
    return {cols_.data() + offsets_[u], cols_.data() + offsets_[u + 1]};
  }
  std::span<const double> neighbor_weights(NodeId u) const noexcept {
    return {weights_.data() + offsets_[u], weights_.data() + offsets_[u + 1]};
  }
  std::size_t hop_degree(NodeId u) const noexcept { return offsets_[u + 1] - offsets_[u]; }

  // 0 when the edge is absent.
  double weight(NodeId u, NodeId v) const noexcept;
  bool has_edge(NodeId u, NodeId v) const noexcept { return weight(u, v) > 0.0; }

  // Sum of weights with each undirected edge and each self-loop counted once.
  double total_weight() const noexcept;

  // Canonical undirected edge list, u <= v, sorted.
  std::vector<Edge> edges() const;

  std::span<const std::size_t> row_offsets() const noexcept { return offsets_; }
  std::span<const NodeId> col_indices() const noexcept { return cols_; }
  std::span<const double> weights() const noexcept { return weights_; }

  // Throws ValidationError describing the first violated invariant.
  void validate() const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeId> cols_;
  std::vector<double> weights_;
};

/// Weighted degree. A self-loop of weight w adds w (not 2w), so
/// sum(degrees) == 2 * (non-loop weight) + (self-loop weight).
std::vector<double> degree_vector(const Graph& g);

// Graph plus the original node labels from the file it was read from.
// labels[id] is the text label of dense node id.
struct LabeledGraph {
  Graph graph;
  std::vector<std::string> labels;
};

// Dense ids written as decimal labels "0".."n-1".
std::vector<std::string> numeric_labels(std::size_t n);

/// Reads "u v [w]" lines. Labels are densified to 0..n-1 in first-seen order.
/// Lines starting with '#' or '%' and blank lines are skipped. In unweighted
/// mode a third column is ignored and duplicate edges collapse to weight 1.
/// A "# nodes N" comment over integer labels 0..N-1 adds the labels that never
/// appear in an edge as isolated nodes, after all others.
LabeledGraph read_edge_list(std::istream& in, bool weighted, const std::string& source = "<stream>");
LabeledGraph load_edge_list(const std::string& path, bool weighted);

// One line "u v w" per undirected edge (u <= v), preceded by a "# nodes N"
// comment. Uses labels when given, dense ids otherwise.
void write_edge_list(std::ostream& out, const Graph& g, std::span<const std::string> labels = {});
void save_edge_list(const std::string& path, const Graph& g, std::span<const std::string> labels = {});

/// Known correspondence between G1 and G2: mapping[u] is u's match in G2 or kNoNode.
struct GroundTruth {
  std::vector<NodeId> mapping;

  // Throws ValidationError if a target is >= n2 or used twice.
  void validate(std::size_t n2) const;
};

// "u<TAB>v" lines in label space.
void write_ground_truth(std::ostream& out, const GroundTruth& truth, std::span<const std::string> labels1,
                        std::span<const std::string> labels2);

struct NoiseSpec {
  double p = 0.0;  // edge-removal probability
  std::uint64_t seed = 0;

  void validate() const;
};

/// Noisy permuted copy of g: node u becomes pi(u) for a uniformly random
/// permutation pi, then every undirected edge is dropped independently with
/// probability p (one draw per edge, in canonical order of the permuted
/// copy). The permutation is a Fisher-Yates shuffle driven by Rng(seed).
std::pair<Graph, GroundTruth> permuted_noisy_copy(const Graph& g, const NoiseSpec& noise);

}  // namespace caper
