#include "caper/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <unordered_map>

#include "caper/error.hpp"
#include "caper/random.hpp"

namespace caper {

namespace {

struct Entry {
  NodeId row;
  NodeId col;
  double w;
};

// Sums duplicates of each undirected edge in input order, then writes both
// directions with the same total so the result is exactly symmetric.
Graph pack_edges(std::size_t n, std::vector<Entry>& edges) {
  std::stable_sort(edges.begin(), edges.end(),
                   [](const Entry& a, const Entry& b) { return a.row != b.row ? a.row < b.row : a.col < b.col; });
  std::vector<Entry> entries;
  entries.reserve(2 * edges.size());
  for (std::size_t i = 0; i < edges.size();) {
    const auto& e = edges[i];
    double w = 0.0;
    std::size_t j = i;
    for (; j < edges.size() && edges[j].row == e.row && edges[j].col == e.col; ++j) w += edges[j].w;
    if (w > 0.0) {
      entries.push_back({e.row, e.col, w});
      if (e.row != e.col) entries.push_back({e.col, e.row, w});
    }
    i = j;
  }
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.row != b.row ? a.row < b.row : a.col < b.col; });
  std::vector<std::size_t> offsets(n + 1, 0);
  std::vector<NodeId> cols;
  std::vector<double> weights;
  cols.reserve(entries.size());
  weights.reserve(entries.size());
  for (const auto& e : entries) {
    cols.push_back(e.col);
    weights.push_back(e.w);
    ++offsets[e.row + 1];
  }
  for (std::size_t u = 0; u < n; ++u) offsets[u + 1] += offsets[u];
  return Graph::from_csr(std::move(offsets), std::move(cols), std::move(weights));
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    if (i >= line.size()) break;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    tokens.push_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

}  // namespace

Graph Graph::from_edges(std::size_t num_nodes, std::span<const Edge> edges) {
  std::vector<Entry> entries;
  entries.reserve(edges.size());
  for (const auto& e : edges) {
    if (e.u >= num_nodes || e.v >= num_nodes)
      throw ValidationError("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) + ") out of range for " +
                            std::to_string(num_nodes) + " nodes");
    if (!std::isfinite(e.w) || e.w < 0.0)
      throw ValidationError("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                            ") has invalid weight " + std::to_string(e.w));
    entries.push_back({std::min(e.u, e.v), std::max(e.u, e.v), e.w});
  }
  return pack_edges(num_nodes, entries);
}

Graph Graph::from_csr(std::vector<std::size_t> row_offsets, std::vector<NodeId> col_indices,
                      std::vector<double> weights) {
  Graph g;
  g.offsets_ = std::move(row_offsets);
  g.cols_ = std::move(col_indices);
  g.weights_ = std::move(weights);
  g.validate();
  return g;
}

std::size_t Graph::num_edges() const noexcept {
  std::size_t loops = 0;
  for (NodeId u = 0; u < num_nodes(); ++u) loops += weight(u, u) > 0.0 ? 1 : 0;
  return (cols_.size() - loops) / 2 + loops;
}

double Graph::weight(NodeId u, NodeId v) const noexcept {
  const auto row = neighbors(u);
  const auto it = std::lower_bound(row.begin(), row.end(), v);
  if (it == row.end() || *it != v) return 0.0;
  return weights_[offsets_[u] + static_cast<std::size_t>(it - row.begin())];
}

double Graph::total_weight() const noexcept {
  double off = 0.0;
  double loops = 0.0;
  for (NodeId u = 0; u < num_nodes(); ++u) {
    const auto nbrs = neighbors(u);
    const auto ws = neighbor_weights(u);
    for (std::size_t k = 0; k < nbrs.size(); ++k) (nbrs[k] == u ? loops : off) += ws[k];
  }
  return off / 2.0 + loops;
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(num_edges());
  for (NodeId u = 0; u < num_nodes(); ++u) {
    const auto nbrs = neighbors(u);
    const auto ws = neighbor_weights(u);
    for (std::size_t k = 0; k < nbrs.size(); ++k)
      if (nbrs[k] >= u) out.push_back({u, nbrs[k], ws[k]});
  }
  return out;
}

void Graph::validate() const {
  if (offsets_.empty() || offsets_.front() != 0) throw ValidationError("row_offsets must start at 0");
  if (offsets_.back() != cols_.size() || cols_.size() != weights_.size())
    throw ValidationError("CSR array sizes disagree");
  const std::size_t n = num_nodes();
  for (std::size_t u = 0; u < n; ++u) {
    if (offsets_[u] > offsets_[u + 1]) throw ValidationError("row_offsets must be nondecreasing");
    for (std::size_t k = offsets_[u]; k < offsets_[u + 1]; ++k) {
      if (cols_[k] >= n) throw ValidationError("column index out of range in row " + std::to_string(u));
      if (k > offsets_[u] && cols_[k] <= cols_[k - 1])
        throw ValidationError("row " + std::to_string(u) + " is not strictly increasing");
      if (!(weights_[k] > 0.0) || !std::isfinite(weights_[k]))
        throw ValidationError("nonpositive weight in row " + std::to_string(u));
    }
  }
  for (NodeId u = 0; u < n; ++u) {
    const auto nbrs = neighbors(u);
    const auto ws = neighbor_weights(u);
    for (std::size_t k = 0; k < nbrs.size(); ++k)
      if (weight(nbrs[k], u) != ws[k])
        throw ValidationError("adjacency is not symmetric at (" + std::to_string(u) + "," +
                              std::to_string(nbrs[k]) + ")");
  }
}

std::vector<double> degree_vector(const Graph& g) {
  std::vector<double> d(g.num_nodes(), 0.0);
  for (NodeId u = 0; u < g.num_nodes(); ++u)
    for (double w : g.neighbor_weights(u)) d[u] += w;
  return d;
}

std::vector<std::string> numeric_labels(std::size_t n) {
  std::vector<std::string> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = std::to_string(i);
  return labels;
}

LabeledGraph read_edge_list(std::istream& in, bool weighted, const std::string& source) {
  std::unordered_map<std::string, NodeId> ids;
  std::vector<std::string> labels;
  std::vector<Edge> edges;
  auto intern = [&](std::string_view label) {
    auto [it, inserted] = ids.try_emplace(std::string(label), static_cast<NodeId>(labels.size()));
    if (inserted) labels.emplace_back(label);
    return it->second;
  };

  std::string raw;
  std::size_t line_no = 0;
  std::optional<std::size_t> declared_nodes;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '%') continue;
    if (line.front() == '#') {
      const auto tokens = split_ws(line.substr(1));
      std::size_t count = 0;
      if (tokens.size() == 2 && tokens[0] == "nodes") {
        const auto [ptr, ec] = std::from_chars(tokens[1].data(), tokens[1].data() + tokens[1].size(), count);
        if (ec == std::errc() && ptr == tokens[1].data() + tokens[1].size()) declared_nodes = count;
      }
      continue;
    }
    const auto tokens = split_ws(line);
    if (tokens.size() < 2 || tokens.size() > 3)
      throw ParseError(source, line_no, "expected 'u v [w]', got '" + std::string(line) + "'");
    double w = 1.0;
    if (weighted && tokens.size() == 3) {
      const auto tok = tokens[2];
      const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), w);
      if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(w))
        throw ParseError(source, line_no, "bad weight '" + std::string(tok) + "'");
      if (w < 0.0) throw ValidationError(source + ":" + std::to_string(line_no) + ": negative weight");
    }
    const NodeId u = intern(tokens[0]);
    const NodeId v = intern(tokens[1]);
    edges.push_back({u, v, w});
  }
  if (in.bad()) throw IoError("read failure on " + source);

  // A "# nodes N" header over integer labels restores isolated nodes, which
  // an edge list cannot otherwise express. They are appended in label order.
  if (declared_nodes && labels.size() < *declared_nodes) {
    std::vector<bool> present(*declared_nodes, false);
    bool numeric = true;
    for (const auto& label : labels) {
      std::size_t value = 0;
      const auto [ptr, ec] = std::from_chars(label.data(), label.data() + label.size(), value);
      if (ec != std::errc() || ptr != label.data() + label.size() || value >= *declared_nodes ||
          std::to_string(value) != label) {
        numeric = false;
        break;
      }
      present[value] = true;
    }
    if (numeric)
      for (std::size_t v = 0; v < *declared_nodes; ++v)
        if (!present[v]) intern(std::to_string(v));
  }

  Graph g = Graph::from_edges(labels.size(), edges);
  if (!weighted) {
    // Binary adjacency: collapse merged duplicates back to 1.
    auto offsets = std::vector<std::size_t>(g.row_offsets().begin(), g.row_offsets().end());
    auto cols = std::vector<NodeId>(g.col_indices().begin(), g.col_indices().end());
    g = Graph::from_csr(std::move(offsets), std::move(cols), std::vector<double>(g.num_entries(), 1.0));
  }
  return {std::move(g), std::move(labels)};
}

LabeledGraph load_edge_list(const std::string& path, bool weighted) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open edge list '" + path + "'");
  return read_edge_list(in, weighted, path);
}

void write_edge_list(std::ostream& out, const Graph& g, std::span<const std::string> labels) {
  if (!labels.empty() && labels.size() != g.num_nodes())
    throw ValidationError("label table size does not match node count");
  auto name = [&](NodeId u) { return labels.empty() ? std::to_string(u) : labels[u]; };
  out << "# nodes " << g.num_nodes() << '\n';
  out << std::setprecision(17);
  for (const auto& e : g.edges()) out << name(e.u) << ' ' << name(e.v) << ' ' << e.w << '\n';
}

void save_edge_list(const std::string& path, const Graph& g, std::span<const std::string> labels) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  write_edge_list(out, g, labels);
  if (!out) throw IoError("write failure on '" + path + "'");
}

void GroundTruth::validate(std::size_t n2) const {
  std::vector<bool> used(n2, false);
  for (std::size_t u = 0; u < mapping.size(); ++u) {
    const NodeId v = mapping[u];
    if (v == kNoNode) continue;
    if (v >= n2) throw ValidationError("ground truth target " + std::to_string(v) + " out of range");
    if (used[v]) throw ValidationError("ground truth target " + std::to_string(v) + " used twice");
    used[v] = true;
  }
}

void write_ground_truth(std::ostream& out, const GroundTruth& truth, std::span<const std::string> labels1,
                        std::span<const std::string> labels2) {
  for (std::size_t u = 0; u < truth.mapping.size(); ++u) {
    const NodeId v = truth.mapping[u];
    if (v == kNoNode) continue;
    out << (labels1.empty() ? std::to_string(u) : labels1[u]) << '\t'
        << (labels2.empty() ? std::to_string(v) : labels2[v]) << '\n';
  }
}

void NoiseSpec::validate() const {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("noise probability must lie in [0,1]");
}

std::pair<Graph, GroundTruth> permuted_noisy_copy(const Graph& g, const NoiseSpec& noise) {
  noise.validate();
  const std::size_t n = g.num_nodes();
  Rng rng(noise.seed);

  std::vector<NodeId> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<NodeId>(i);
  for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);

  std::vector<Edge> permuted;
  permuted.reserve(g.num_edges());
  for (const auto& e : g.edges()) {
    const NodeId a = perm[e.u];
    const NodeId b = perm[e.v];
    permuted.push_back({std::min(a, b), std::max(a, b), e.w});
  }
  std::sort(permuted.begin(), permuted.end(),
            [](const Edge& x, const Edge& y) { return x.u != y.u ? x.u < y.u : x.v < y.v; });

  std::vector<Edge> kept;
  kept.reserve(permuted.size());
  for (const auto& e : permuted)
    if (!(rng.unit() < noise.p)) kept.push_back(e);

  return {Graph::from_edges(n, kept), GroundTruth{std::move(perm)}};
}

}  // namespace caper
