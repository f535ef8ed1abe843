#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "caper/alignment.hpp"
#include "caper/graph.hpp"

namespace caper {

// Degree-histogram structural aligner. bins == 0 and topk == 0 mean "derive
// from the input": bins = ceil(log2(max degree + 1)) + 1, topk = ceil(log2 n).
struct BuiltinAlignerParams {
  std::size_t hops = 2;
  std::size_t bins = 0;
  double discount = 0.5;
  double gamma = 1.0;
  std::size_t topk = 0;
};

// Command template with {graph1}, {graph2} and {output} placeholders. The
// graphs are written as "u v w" edge lists over dense ids with a leading
// "# nodes N" comment; the command must write "i j s" triples to {output}.
struct ExternalAlignerParams {
  std::string command;
  std::string workdir;  // empty: a fresh directory under the system temp dir
};

struct BaseAlignerSpec {
  enum class Kind { Builtin, External };

  Kind kind = Kind::Builtin;
  BuiltinAlignerParams builtin;
  ExternalAlignerParams external;

  void validate() const;
};

struct PaddedPair {
  Graph g1;
  Graph g2;
  std::size_t pad1 = 0;  // isolated nodes appended to g1
  std::size_t pad2 = 0;
};

/// Appends isolated nodes (highest ids) to the smaller graph.
PaddedPair pad_to_common_size(const Graph& g1, const Graph& g2);

// Row-major n x dim matrix of per-node features.
struct FeatureMatrix {
  std::size_t dim = 0;
  std::vector<double> values;

  std::size_t rows() const noexcept { return dim ? values.size() / dim : 0; }
  std::span<const double> row(std::size_t u) const noexcept { return {values.data() + u * dim, dim}; }
};

// ceil(log2(max weighted degree over both graphs + 1)) + 1.
std::size_t default_bin_count(const Graph& g1, const Graph& g2);

/// For every node: for each hop h in 1..hops, histogram the nodes at BFS
/// distance exactly h by log-degree bin min(floor(log2(deg + 1)), bins - 1),
/// then sum the per-hop histograms with weight discount^(h - 1).
FeatureMatrix structural_features(const Graph& g, std::size_t hops, std::size_t bins, double discount);

/// s_ij = exp(-gamma * ||f_i - f_j||) kept for the topk nearest columns of
/// each row (exact search, ties by column id). Rows of isolated nodes get a
/// uniform 1/topk over their retained columns. g1 and g2 must already have
/// equal size.
AlignmentMatrix builtin_align(const Graph& g1, const Graph& g2, const BuiltinAlignerParams& params = {});

/// Runs the external command on the two graphs and parses its output.
/// Throws ExternalAlignerError on a nonzero exit, ParseError on bad output.
AlignmentMatrix external_align(const Graph& g1, const Graph& g2, const ExternalAlignerParams& params);

AlignmentMatrix base_align(const Graph& g1, const Graph& g2, const BaseAlignerSpec& spec);

}  // namespace caper
