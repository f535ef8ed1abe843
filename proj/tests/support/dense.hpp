#pragma once

// Dense reference computations used as oracles by the unit and acceptance
// tests. Deliberately naive.

#include <cmath>
#include <vector>

#include "caper/alignment.hpp"
#include "caper/coarsen.hpp"
#include "caper/graph.hpp"

namespace caper::testing {

using Dense = std::vector<std::vector<double>>;

inline Dense dense_adjacency(const Graph& g) {
  Dense a(g.num_nodes(), std::vector<double>(g.num_nodes(), 0.0));
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    const auto nbrs = g.neighbors(u);
    const auto ws = g.neighbor_weights(u);
    for (std::size_t k = 0; k < nbrs.size(); ++k) a[u][nbrs[k]] = ws[k];
  }
  return a;
}

inline Dense dense_alignment(const AlignmentMatrix& s) {
  Dense d(s.n1(), std::vector<double>(s.n2(), 0.0));
  for (NodeId i = 0; i < s.n1(); ++i)
    for (const auto& e : s.row(i)) d[i][e.col] = e.score;
  return d;
}

inline Dense multiply(const Dense& a, const Dense& b) {
  const std::size_t n = a.size(), m = b.empty() ? 0 : b[0].size(), inner = b.size();
  Dense c(n, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < inner; ++k) s += a[i][k] * b[k][j];
      c[i][j] = s;
    }
  return c;
}

inline Dense transpose(const Dense& a) {
  Dense t(a.empty() ? 0 : a[0].size(), std::vector<double>(a.size(), 0.0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) t[j][i] = a[i][j];
  return t;
}

// P in {0,1}^(n x n_coarse).
inline Dense assignment_matrix(const Assignment& a) {
  Dense p(a.num_fine(), std::vector<double>(a.num_coarse, 0.0));
  for (std::size_t u = 0; u < a.num_fine(); ++u) p[u][a.fine_to_coarse[u]] = 1.0;
  return p;
}

// Coarse adjacency from P^T A P. Off-diagonal entries count each fine edge
// once. The diagonal counts an internal edge twice and a fine loop once, so
// adding the member loops back and halving gives the stored loop weight.
inline Dense contracted_oracle(const Graph& g, const Assignment& a) {
  const Dense adj = dense_adjacency(g);
  const Dense p = assignment_matrix(a);
  Dense c = multiply(multiply(transpose(p), adj), p);
  std::vector<double> loops(a.num_coarse, 0.0);
  for (std::size_t u = 0; u < g.num_nodes(); ++u) loops[a.fine_to_coarse[u]] += adj[u][u];
  for (std::size_t s = 0; s < a.num_coarse; ++s) c[s][s] = (c[s][s] + loops[s]) / 2.0;
  return c;
}

// One row-then-column normalization; zero-sum rows/columns unchanged.
inline void dense_normalize(Dense& s) {
  for (auto& row : s) {
    double sum = 0.0;
    for (double x : row) sum += x;
    if (sum > 0.0)
      for (double& x : row) x /= sum;
  }
  if (s.empty()) return;
  for (std::size_t j = 0; j < s[0].size(); ++j) {
    double sum = 0.0;
    for (const auto& row : s) sum += row[j];
    if (sum > 0.0)
      for (auto& row : s) row[j] /= sum;
  }
}

// NORMALIZE(S o A1 S A2 + eps), with +eps applied on the support formed by
// the stored entries of S and the nonzero entries of A1 S A2.
inline Dense dense_refine_step(const Graph& a1, const Graph& a2, const AlignmentMatrix& s, double eps) {
  const Dense sd = dense_alignment(s);
  const Dense t = multiply(multiply(dense_adjacency(a1), sd), dense_adjacency(a2));
  Dense out(sd.size(), std::vector<double>(s.n2(), 0.0));
  for (NodeId i = 0; i < s.n1(); ++i) {
    std::vector<bool> stored(s.n2(), false);
    for (const auto& e : s.row(i)) stored[e.col] = true;
    for (std::size_t j = 0; j < s.n2(); ++j)
      if (stored[j] || t[i][j] > 0.0) out[i][j] = sd[i][j] * t[i][j] + eps;
  }
  dense_normalize(out);
  return out;
}

}  // namespace caper::testing
