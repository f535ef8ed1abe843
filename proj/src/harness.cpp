#include "caper/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "caper/error.hpp"

namespace caper {

std::vector<NodeId> extract_matching(const AlignmentMatrix& s, MatchingMode mode) {
  std::vector<NodeId> mapping(s.n1(), kNoNode);
  if (mode == MatchingMode::RowArgmax) {
    for (NodeId i = 0; i < s.n1(); ++i) {
      double best = -1.0;
      for (const auto& e : s.row(i))
        if (e.score > best) {
          best = e.score;
          mapping[i] = e.col;
        }
    }
    return mapping;
  }

  auto entries = s.triplets();
  std::stable_sort(entries.begin(), entries.end(),
                   [](const AlignmentTriplet& a, const AlignmentTriplet& b) { return a.score > b.score; });
  std::vector<bool> used(s.n2(), false);
  for (const auto& t : entries) {
    if (mapping[t.row] != kNoNode || used[t.col]) continue;
    mapping[t.row] = t.col;
    used[t.col] = true;
  }
  return mapping;
}

double accuracy(std::span<const NodeId> mapping, const GroundTruth& truth) {
  std::size_t defined = 0, correct = 0;
  for (std::size_t u = 0; u < truth.mapping.size(); ++u) {
    if (truth.mapping[u] == kNoNode) continue;
    ++defined;
    if (u < mapping.size() && mapping[u] == truth.mapping[u]) ++correct;
  }
  return defined ? static_cast<double>(correct) / static_cast<double>(defined) : 0.0;
}

double evaluate_alignment(std::istream& alignment, std::istream& truth, MatchingMode mode) {
  std::unordered_map<std::string, NodeId> ids1, ids2;
  auto intern = [](std::unordered_map<std::string, NodeId>& ids, const std::string& label) {
    return ids.try_emplace(label, static_cast<NodeId>(ids.size())).first->second;
  };

  std::vector<AlignmentTriplet> triplets;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(alignment, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string a, b, extra;
    double score = 0.0;
    if (!(ss >> a) || a.front() == '#') continue;
    if (!(ss >> b >> score) || (ss >> extra) || !std::isfinite(score) || score < 0.0)
      throw ParseError("alignment", line_no, "expected 'i j s'");
    triplets.push_back({intern(ids1, a), intern(ids2, b), score});
  }

  std::vector<std::pair<NodeId, NodeId>> pairs;
  line_no = 0;
  while (std::getline(truth, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string u, v, extra;
    if (!(ss >> u) || u.front() == '#') continue;
    if (!(ss >> v) || (ss >> extra)) throw ParseError("truth", line_no, "expected 'u<TAB>v'");
    pairs.emplace_back(intern(ids1, u), intern(ids2, v));
  }

  GroundTruth gt;
  gt.mapping.assign(ids1.size(), kNoNode);
  for (const auto& [u, v] : pairs) gt.mapping[u] = v;
  gt.validate(ids2.size());
  const auto s = AlignmentMatrix::from_triplets(ids1.size(), ids2.size(), triplets);
  return accuracy(extract_matching(s, mode), gt);
}

std::string_view arm_name(Arm arm) {
  switch (arm) {
    case Arm::BaseOnly:
      return "base-only";
    case Arm::Caper:
      return "caper";
    case Arm::CaperHardStart:
      return "caper-hard-start";
  }
  return "?";
}

std::optional<Arm> parse_arm(std::string_view name) {
  for (Arm a : {Arm::BaseOnly, Arm::Caper, Arm::CaperHardStart})
    if (arm_name(a) == name) return a;
  return std::nullopt;
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw ValidationError("trials must be >= 1");
  if (noise_levels.empty()) throw ValidationError("at least one noise level is required");
  for (double p : noise_levels)
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("noise levels must lie in [0,1]");
  if (arms.empty()) throw ValidationError("at least one arm is required");
  caper.validate();
}

TrialResult run_trial(Arm arm, const Graph& g1, const Graph& g2, const GroundTruth& truth,
                      const ExperimentConfig& cfg) {
  TrialResult out;
  AlignmentMatrix s;
  if (arm == Arm::BaseOnly) {
    const auto start = std::chrono::steady_clock::now();
    const auto padded = pad_to_common_size(g1, g2);
    s = base_align(padded.g1, padded.g2, cfg.caper.base).stripped(g1.num_nodes(), g2.num_nodes());
    out.times.align_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.coarsest_nodes = padded.g1.num_nodes();
  } else {
    CaperConfig c = cfg.caper;
    c.refine.mode = arm == Arm::CaperHardStart ? RefineConfig::Mode::HardStartSoft : RefineConfig::Mode::Soft;
    auto result = run_caper(g1, g2, c);
    s = std::move(result.alignment);
    out.times = result.times;
    out.coarsest_nodes = std::max(result.coarsest_n1, result.coarsest_n2);
  }
  out.accuracy = accuracy(extract_matching(s, cfg.scoring), truth);
  return out;
}

Report run_experiment(const Graph& g, const ExperimentConfig& cfg) {
  cfg.validate();
  Report report;
  for (double p : cfg.noise_levels) {
    std::vector<ReportRow> cells;
    for (Arm arm : cfg.arms) {
      ReportRow row;
      row.arm = arm;
      row.p = p;
      cells.push_back(row);
    }
    for (std::size_t t = 0; t < cfg.trials; ++t) {
      const auto [g2, truth] = permuted_noisy_copy(g, NoiseSpec{p, cfg.seed + t});
      for (auto& cell : cells) {
        if (cell.failed) continue;
        try {
          const auto r = run_trial(cell.arm, g, g2, truth, cfg);
          cell.accuracies.push_back(r.accuracy);
          cell.mean_times.coarsen_s += r.times.coarsen_s;
          cell.mean_times.align_s += r.times.align_s;
          cell.mean_times.refine_s += r.times.refine_s;
        } catch (const std::exception& e) {
          cell.failed = true;
          cell.error = e.what();
        }
      }
    }
    for (auto& cell : cells) {
      cell.trials = cfg.trials;
      if (!cell.failed) {
        const double k = static_cast<double>(cell.accuracies.size());
        double sum = 0.0;
        for (double a : cell.accuracies) sum += a;
        cell.acc_mean = sum / k;
        double var = 0.0;
        for (double a : cell.accuracies) var += (a - cell.acc_mean) * (a - cell.acc_mean);
        cell.acc_std = std::sqrt(var / k);
        cell.mean_times.coarsen_s /= k;
        cell.mean_times.align_s /= k;
        cell.mean_times.refine_s /= k;
      }
      report.rows.push_back(std::move(cell));
    }
  }
  return report;
}

Report run_experiment(const ExperimentConfig& cfg) {
  const auto loaded = load_edge_list(cfg.input, cfg.weighted);
  return run_experiment(loaded.graph, cfg);
}

void Report::write_csv(std::ostream& out, bool include_timings) const {
  out << "arm,p,trials,acc_mean,acc_std";
  if (include_timings) out << ",t_coarsen_s,t_align_s,t_refine_s";
  out << '\n';
  for (const auto& r : rows) {
    std::ostringstream line;
    line << arm_name(r.arm) << ',' << std::defaultfloat << r.p << ',' << r.trials << ',';
    if (r.failed)
      line << "failed,failed";
    else
      line << std::fixed << std::setprecision(6) << r.acc_mean << ',' << r.acc_std;
    if (include_timings) {
      if (r.failed)
        line << ",,,";
      else
        line << std::fixed << std::setprecision(6) << ',' << r.mean_times.coarsen_s << ',' << r.mean_times.align_s
             << ',' << r.mean_times.refine_s;
    }
    out << line.str() << '\n';
  }
}

std::string Report::summary() const {
  std::ostringstream out;
  out << std::left << std::setw(18) << "arm" << std::setw(8) << "p" << std::setw(22) << "accuracy"
      << "time (coarsen/align/refine s)\n";
  for (const auto& r : rows) {
    out << std::left << std::setw(18) << arm_name(r.arm) << std::setw(8) << r.p;
    if (r.failed) {
      out << "FAILED: " << r.error << '\n';
      continue;
    }
    std::ostringstream acc;
    acc << std::fixed << std::setprecision(4) << r.acc_mean << " +- " << r.acc_std;
    out << std::setw(22) << acc.str() << std::fixed << std::setprecision(3) << r.mean_times.coarsen_s << " / "
        << r.mean_times.align_s << " / " << r.mean_times.refine_s << '\n';
    out << std::defaultfloat;
  }
  return out.str();
}

}  // namespace caper
