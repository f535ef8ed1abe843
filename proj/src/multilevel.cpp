#include "caper/multilevel.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <filesystem>

#include "caper/error.hpp"

namespace caper {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_shape(const AlignmentMatrix& s, const Graph& a1, const Graph& a2) {
  if (s.n1() != a1.num_nodes() || s.n2() != a2.num_nodes())
    throw ValidationError("alignment is " + std::to_string(s.n1()) + "x" + std::to_string(s.n2()) +
                          " but graphs have " + std::to_string(a1.num_nodes()) + " and " +
                          std::to_string(a2.num_nodes()) + " nodes");
}

}  // namespace

void RefineConfig::validate() const {
  if (epsilon && !(*epsilon > 0.0 && std::isfinite(*epsilon))) throw ValidationError("refine.epsilon must be > 0");
  if (topk && *topk < 1) throw ValidationError("refine.topk must be >= 1");
}

void CaperConfig::validate() const {
  refine.validate();
  base.validate();
}

double auto_epsilon(std::size_t n) {
  int exponent = 0;
  for (std::size_t p = 1; p < n; p *= 10) ++exponent;
  return std::pow(10.0, -exponent);
}

std::size_t auto_topk(std::size_t n) {
  return n <= 2 ? 1 : static_cast<std::size_t>(std::bit_width(n - 1));
}

AlignmentMatrix project(const AlignmentMatrix& s, const Assignment& p1, const Assignment& p2) {
  if (s.n1() != p1.num_coarse || s.n2() != p2.num_coarse)
    throw ValidationError("projection: alignment is " + std::to_string(s.n1()) + "x" + std::to_string(s.n2()) +
                          " but assignments have " + std::to_string(p1.num_coarse) + " and " +
                          std::to_string(p2.num_coarse) + " supernodes");
  const auto members2 = p2.members();
  std::vector<std::vector<AlignmentEntry>> rows(p1.num_fine());
  for (std::size_t u = 0; u < p1.num_fine(); ++u) {
    auto& row = rows[u];
    for (const auto& e : s.row(p1.fine_to_coarse[u]))
      for (NodeId v : members2[e.col]) row.push_back({v, e.score});
  }
  return AlignmentMatrix::from_rows(p2.num_fine(), std::move(rows));
}

AlignmentMatrix normalize_once(const AlignmentMatrix& s) {
  std::vector<std::vector<AlignmentEntry>> rows(s.n1());
  std::vector<double> col_sum(s.n2(), 0.0);
  for (NodeId i = 0; i < s.n1(); ++i) {
    const auto r = s.row(i);
    double sum = 0.0;
    for (const auto& e : r) sum += e.score;
    rows[i].assign(r.begin(), r.end());
    if (sum > 0.0)
      for (auto& e : rows[i]) e.score /= sum;
    for (const auto& e : rows[i]) col_sum[e.col] += e.score;
  }
  for (auto& row : rows)
    for (auto& e : row)
      if (col_sum[e.col] > 0.0) e.score /= col_sum[e.col];
  return AlignmentMatrix::from_rows(s.n2(), std::move(rows));
}

AlignmentMatrix binarize_rows(const AlignmentMatrix& s) {
  std::vector<std::vector<AlignmentEntry>> rows(s.n1());
  for (NodeId i = 0; i < s.n1(); ++i) {
    const auto r = s.row(i);
    if (r.empty()) continue;
    // Columns are ascending, so the first maximum is the smallest column.
    const auto best = std::max_element(r.begin(), r.end(),
                                       [](const AlignmentEntry& a, const AlignmentEntry& b) { return a.score < b.score; });
    rows[i].push_back({best->col, 1.0});
  }
  return AlignmentMatrix::from_rows(s.n2(), std::move(rows));
}

AlignmentMatrix refine_step(const AlignmentMatrix& s, const Graph& a1, const Graph& a2, double eps,
                            std::size_t topk) {
  check_shape(s, a1, a2);
  if (!(eps > 0.0) || !std::isfinite(eps)) throw ValidationError("refinement epsilon must be > 0");
  if (topk < 1) throw ValidationError("refinement topk must be >= 1");

  const std::size_t n2 = s.n2();
  // Dense scratch rows over G2 indexed by column, reset through the touched lists.
  std::vector<double> m_val(n2, 0.0), t_val(n2, 0.0);
  std::vector<char> m_seen(n2, 0), t_seen(n2, 0);
  std::vector<NodeId> m_touched, t_touched;

  struct Scored {
    NodeId col;
    double value;  // S o T + eps
    double t;
  };
  std::vector<Scored> scored;
  std::vector<std::vector<AlignmentEntry>> rows(s.n1());

  for (NodeId i = 0; i < s.n1(); ++i) {
    // Row i of A1 S.
    const auto nbrs1 = a1.neighbors(i);
    const auto w1 = a1.neighbor_weights(i);
    for (std::size_t k = 0; k < nbrs1.size(); ++k)
      for (const auto& e : s.row(nbrs1[k])) {
        if (e.score == 0.0) continue;  // reachability starts from nonzeros only
        if (!m_seen[e.col]) {
          m_seen[e.col] = 1;
          m_touched.push_back(e.col);
        }
        m_val[e.col] += w1[k] * e.score;
      }
    // Row i of (A1 S) A2.
    for (NodeId b : m_touched) {
      const auto nbrs2 = a2.neighbors(b);
      const auto w2 = a2.neighbor_weights(b);
      for (std::size_t k = 0; k < nbrs2.size(); ++k) {
        const NodeId j = nbrs2[k];
        if (!t_seen[j]) {
          t_seen[j] = 1;
          t_touched.push_back(j);
        }
        t_val[j] += m_val[b] * w2[k];
      }
    }

    scored.clear();
    for (const auto& e : s.row(i)) {
      scored.push_back({e.col, e.score * t_val[e.col] + eps, t_val[e.col]});
      t_seen[e.col] = 2;  // already emitted
    }
    for (NodeId j : t_touched)
      if (t_seen[j] == 1) scored.push_back({j, eps, t_val[j]});

    auto better = [](const Scored& a, const Scored& b) {
      if (a.value != b.value) return a.value > b.value;
      if (a.t != b.t) return a.t > b.t;
      return a.col < b.col;
    };
    if (scored.size() > topk) {
      std::nth_element(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(topk - 1), scored.end(), better);
      scored.resize(topk);
    }
    auto& row = rows[i];
    row.reserve(scored.size());
    for (const auto& c : scored) row.push_back({c.col, c.value});

    for (NodeId b : m_touched) {
      m_val[b] = 0.0;
      m_seen[b] = 0;
    }
    for (NodeId j : t_touched) {
      t_val[j] = 0.0;
      t_seen[j] = 0;
    }
    for (const auto& e : s.row(i)) {
      t_val[e.col] = 0.0;
      t_seen[e.col] = 0;
    }
    m_touched.clear();
    t_touched.clear();
  }
  return normalize_once(AlignmentMatrix::from_rows(n2, std::move(rows)));
}

AlignmentMatrix refine(const AlignmentMatrix& s, const Graph& a1, const Graph& a2, const RefineConfig& cfg) {
  cfg.validate();
  check_shape(s, a1, a2);
  const std::size_t n = std::max(s.n1(), s.n2());
  const double eps = cfg.epsilon.value_or(auto_epsilon(n));
  const std::size_t topk = cfg.topk.value_or(auto_topk(n));

  AlignmentMatrix current = cfg.mode == RefineConfig::Mode::HardStartSoft ? binarize_rows(s) : s;
  for (std::size_t it = 0; it < cfg.iterations; ++it) current = refine_step(current, a1, a2, eps, topk);
  return current;
}

CaperResult run_caper(const Graph& g1, const Graph& g2, const CaperConfig& cfg) {
  cfg.validate();
  if (g1.num_nodes() == 0 || g2.num_nodes() == 0) throw ValidationError("caper needs two nonempty graphs");

  CaperResult result;
  auto start = Clock::now();
  auto h1 = build_hierarchy(g1, cfg.levels);
  auto h2 = build_hierarchy(g2, cfg.levels);
  const std::size_t levels = std::min(h1.levels(), h2.levels());
  h1.graphs.resize(levels + 1);
  h1.assignments.resize(levels);
  h2.graphs.resize(levels + 1);
  h2.assignments.resize(levels);
  result.times.coarsen_s = seconds_since(start);
  result.levels_used = levels;

  const Graph& c1 = h1.coarsest();
  const Graph& c2 = h2.coarsest();
  result.coarsest_n1 = c1.num_nodes();
  result.coarsest_n2 = c2.num_nodes();

  start = Clock::now();
  const auto padded = pad_to_common_size(c1, c2);
  AlignmentMatrix s = base_align(padded.g1, padded.g2, cfg.base);
  result.times.align_s = seconds_since(start);

  auto dump = [&](std::size_t level, const AlignmentMatrix& m) {
    if (cfg.dump_dir.empty()) return;
    std::filesystem::create_directories(cfg.dump_dir);
    save_alignment((std::filesystem::path(cfg.dump_dir) / ("level_" + std::to_string(level) + ".align")).string(),
                   m);
  };

  start = Clock::now();
  s = refine(s, padded.g1, padded.g2, cfg.refine).stripped(c1.num_nodes(), c2.num_nodes());
  dump(levels, s);

  RefineConfig finer = cfg.refine;
  finer.mode = RefineConfig::Mode::Soft;
  for (std::size_t level = levels; level > 0; --level) {
    s = project(s, h1.assignments[level - 1], h2.assignments[level - 1]);
    s = refine(s, h1.graphs[level - 1], h2.graphs[level - 1], finer);
    dump(level - 1, s);
  }
  result.times.refine_s = seconds_since(start);
  result.alignment = std::move(s);
  return result;
}

}  // namespace caper
