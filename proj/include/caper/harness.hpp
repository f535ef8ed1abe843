#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "caper/alignment.hpp"
#include "caper/graph.hpp"
#include "caper/multilevel.hpp"

namespace caper {

enum class MatchingMode {
  RowArgmax,  // each G1 node takes its best column; ties to the smallest column
  Bijective,  // greedy global pick of the largest remaining score, one use per node
};

// mapping[i] is the G2 node chosen for G1 node i, or kNoNode for an empty row
// (or a row left without a free column in bijective mode).
std::vector<NodeId> extract_matching(const AlignmentMatrix& s, MatchingMode mode = MatchingMode::RowArgmax);

// Fraction of nodes with a defined truth entry whose mapping equals it. 0 when
// no truth entry is defined.
double accuracy(std::span<const NodeId> mapping, const GroundTruth& truth);

/// Scores a label-space alignment file ("i j s" lines) against a truth file
/// ("u<TAB>v" lines). Labels are matched textually; a truth source with no
/// alignment row counts as wrong.
double evaluate_alignment(std::istream& alignment, std::istream& truth, MatchingMode mode = MatchingMode::RowArgmax);

enum class Arm { BaseOnly, Caper, CaperHardStart };

std::string_view arm_name(Arm arm);
std::optional<Arm> parse_arm(std::string_view name);

struct ExperimentConfig {
  std::string input;
  bool weighted = false;
  std::vector<double> noise_levels{0.05, 0.10, 0.15, 0.20, 0.25};
  std::size_t trials = 5;
  std::uint64_t seed = 0;  // trial t uses seed + t
  CaperConfig caper;
  std::vector<Arm> arms{Arm::BaseOnly, Arm::Caper};
  MatchingMode scoring = MatchingMode::RowArgmax;
  std::string output;  // CSV path; empty: not written by the CLI

  void validate() const;
};

struct TrialResult {
  double accuracy = 0.0;
  StageTimes times;
  std::size_t coarsest_nodes = 0;  // max of the two sides at the aligned level
};

/// Aligns g2 to g1 with one arm and scores the result against truth.
TrialResult run_trial(Arm arm, const Graph& g1, const Graph& g2, const GroundTruth& truth,
                      const ExperimentConfig& cfg);

struct ReportRow {
  Arm arm = Arm::Caper;
  double p = 0.0;
  std::size_t trials = 0;
  bool failed = false;
  std::string error;
  double acc_mean = 0.0;
  double acc_std = 0.0;  // population standard deviation over trials
  StageTimes mean_times;
  std::vector<double> accuracies;  // per trial
};

struct Report {
  std::vector<ReportRow> rows;

  /// Header arm,p,trials,acc_mean,acc_std,t_coarsen_s,t_align_s,t_refine_s.
  /// Failed cells carry "failed" in the accuracy columns. Without timings the
  /// three t_ columns are left out, giving a run-to-run identical file.
  void write_csv(std::ostream& out, bool include_timings = true) const;
  std::string summary() const;
};

/// For every noise level and trial builds a noisy permuted copy of g and
/// runs each arm on it. A throwing arm marks its (arm, p) cell failed and the
/// sweep continues.
Report run_experiment(const Graph& g, const ExperimentConfig& cfg);
Report run_experiment(const ExperimentConfig& cfg);

}  // namespace caper
