#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "caper/graph.hpp"

namespace caper {

/// Fine-node -> supernode map (the 0/1 assignment matrix stored by rows).
/// Each supernode owns one or two fine nodes.
struct Assignment {
  std::vector<NodeId> fine_to_coarse;
  std::size_t num_coarse = 0;

  std::size_t num_fine() const noexcept { return fine_to_coarse.size(); }

  // members[c] lists the fine nodes of supernode c in ascending order.
  std::vector<std::vector<NodeId>> members() const;

  static Assignment identity(std::size_t n);

  void validate() const;
};

/// graphs[0] is the input; assignments[l - 1] maps graphs[l - 1] onto graphs[l].
struct Hierarchy {
  std::vector<Graph> graphs;
  std::vector<Assignment> assignments;

  std::size_t levels() const noexcept { return assignments.size(); }
  const Graph& coarsest() const { return graphs.back(); }
};

using MergePair = std::pair<NodeId, NodeId>;

// w_uv / sqrt(d_u d_v) with weighted degrees. Throws ValidationError for a
// self-loop or a non-edge.
double normalized_edge_weight(const Graph& g, NodeId u, NodeId v);

/// Normalized heavy-edge matching. Non-loop edges are ranked once by
/// normalized weight (degrees taken before any merge), descending. Ties go
/// to the smaller (min, max) endpoint degree, then the smaller (min, max)
/// endpoint neighbor-degree sum, then the smaller (min, max) color-refinement
/// class, then (min(u,v), max(u,v)). One scan accepts
/// an edge when both endpoints are still free. Pairs come back in acceptance
/// order.
std::vector<MergePair> nhem_match(const Graph& g);

/// Collapses each pair into a supernode. Supernode ids follow the smallest
/// fine id of each group. Edges between groups sum; edges inside a group and
/// fine self-loops accumulate into the supernode's self-loop.
std::pair<Graph, Assignment> contract(const Graph& g, std::span<const MergePair> pairs);

/// Up to `levels` rounds of nhem_match + contract; stops early once a round
/// merges nothing.
Hierarchy build_hierarchy(const Graph& g, std::size_t levels);

/// Writes level_<l>.edges, assign_<l>.tsv (fine_id<TAB>coarse_id) and a
/// manifest.txt into `dir`, which must exist. When level-0 labels are given
/// they are written to labels.tsv (id<TAB>label).
void save_hierarchy(const std::string& dir, const Hierarchy& h, std::span<const std::string> labels = {});

}  // namespace caper
