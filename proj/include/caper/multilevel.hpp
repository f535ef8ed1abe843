#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "caper/alignment.hpp"
#include "caper/base_align.hpp"
#include "caper/coarsen.hpp"
#include "caper/graph.hpp"

namespace caper {

struct RefineConfig {
  enum class Mode {
    Soft,           // refine the soft alignment as given
    HardStartSoft,  // binarize to row argmax first, then refine softly
  };

  std::size_t iterations = 100;
  std::optional<double> epsilon;    // unset: 10^-ceil(log10(max(n1, n2))) per level
  std::optional<std::size_t> topk;  // unset: ceil(log2(max(n1, n2))) per level
  Mode mode = Mode::Soft;

  void validate() const;
};

struct CaperConfig {
  std::size_t levels = 3;
  RefineConfig refine;
  BaseAlignerSpec base;
  std::string dump_dir;  // when set, every level's refined alignment is written there

  void validate() const;
};

double auto_epsilon(std::size_t n);
std::size_t auto_topk(std::size_t n);

/// Expands a coarse alignment to the next finer level:
/// fine(u, v) = s(p1[u], p2[v]), i.e. P1 S P2^T with P of shape fine x coarse.
AlignmentMatrix project(const AlignmentMatrix& s, const Assignment& p1, const Assignment& p2);

/// One pass of row-sum then column-sum scaling. Zero-sum rows/columns are left as is.
AlignmentMatrix normalize_once(const AlignmentMatrix& s);

/// Row argmax (ties to the smallest column) with score 1.
AlignmentMatrix binarize_rows(const AlignmentMatrix& s);

/// S <- normalize_once(topk(S o (A1 S A2) + eps)).
///
/// A1 S A2 is evaluated only on the columns reachable from row i through
/// A1, the nonzeros of S and A2; that set together with the stored entries of row i forms the
/// support, and eps is added there only. Each row keeps the topk largest
/// values, ties going to the larger A1 S A2 entry and then the smaller column.
AlignmentMatrix refine_step(const AlignmentMatrix& s, const Graph& a1, const Graph& a2, double eps, std::size_t topk);

/// cfg.iterations applications of refine_step with epsilon / topk resolved
/// for this pair's size.
AlignmentMatrix refine(const AlignmentMatrix& s, const Graph& a1, const Graph& a2, const RefineConfig& cfg);

struct StageTimes {
  double coarsen_s = 0.0;
  double align_s = 0.0;
  double refine_s = 0.0;  // projection + refinement
};

struct CaperResult {
  AlignmentMatrix alignment;
  std::size_t levels_used = 0;
  std::size_t coarsest_n1 = 0;
  std::size_t coarsest_n2 = 0;
  StageTimes times;
};

/// Coarsen both graphs, align the coarsest pair, then refine and project
/// level by level back to the inputs. If the two hierarchies stop at
/// different depths both are cut to the shallower one. In HardStartSoft mode
/// only the base alignment is binarized; finer levels refine softly.
CaperResult run_caper(const Graph& g1, const Graph& g2, const CaperConfig& cfg);

inline AlignmentMatrix caper(const Graph& g1, const Graph& g2, const CaperConfig& cfg) {
  return run_caper(g1, g2, cfg).alignment;
}

}  // namespace caper
