#include "caper/base_align.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <queue>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "caper/error.hpp"

namespace caper {

namespace {

std::size_t ceil_log2(std::size_t n) { return n <= 1 ? 0 : static_cast<std::size_t>(std::bit_width(n - 1)); }

Graph with_isolated_nodes(const Graph& g, std::size_t extra) {
  if (extra == 0) return g;
  std::vector<std::size_t> offsets(g.row_offsets().begin(), g.row_offsets().end());
  offsets.resize(offsets.size() + extra, offsets.back());
  return Graph::from_csr(std::move(offsets), {g.col_indices().begin(), g.col_indices().end()},
                         {g.weights().begin(), g.weights().end()});
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'')
      out += "'\\''";
    else
      out += c;
  }
  return out + "'";
}

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size()))
    s.replace(pos, from.size(), to);
  return s;
}

std::string read_tail(const std::filesystem::path& path, std::size_t max_bytes) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  std::ostringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  if (text.size() > max_bytes) text = "..." + text.substr(text.size() - max_bytes);
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
  return text;
}

// Scratch directory removed on scope exit when we created it.
class ScratchDir {
 public:
  explicit ScratchDir(const std::string& requested) {
    namespace fs = std::filesystem;
    static std::atomic<unsigned> counter{0};
    if (!requested.empty()) {
      path_ = fs::path(requested);
      fs::create_directories(path_);
      return;
    }
    path_ = fs::temp_directory_path() /
            ("caper-" + std::to_string(::getpid()) + "-" + std::to_string(counter.fetch_add(1)));
    fs::create_directories(path_);
    owned_ = true;
  }
  ~ScratchDir() {
    if (owned_) {
      std::error_code ec;
      std::filesystem::remove_all(path_, ec);
    }
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
  bool owned_ = false;
};

}  // namespace

void BaseAlignerSpec::validate() const {
  if (kind == Kind::Builtin) {
    if (builtin.hops < 1) throw ValidationError("base.hops must be >= 1");
    if (!(builtin.discount > 0.0 && builtin.discount <= 1.0)) throw ValidationError("base.discount must be in (0,1]");
    if (!(builtin.gamma > 0.0) || !std::isfinite(builtin.gamma)) throw ValidationError("base.gamma must be > 0");
  } else {
    for (const char* placeholder : {"{graph1}", "{graph2}", "{output}"})
      if (external.command.find(placeholder) == std::string::npos)
        throw ValidationError(std::string("external command template lacks ") + placeholder);
  }
}

PaddedPair pad_to_common_size(const Graph& g1, const Graph& g2) {
  const std::size_t n = std::max(g1.num_nodes(), g2.num_nodes());
  PaddedPair out;
  out.pad1 = n - g1.num_nodes();
  out.pad2 = n - g2.num_nodes();
  out.g1 = with_isolated_nodes(g1, out.pad1);
  out.g2 = with_isolated_nodes(g2, out.pad2);
  return out;
}

std::size_t default_bin_count(const Graph& g1, const Graph& g2) {
  double max_degree = 0.0;
  for (const Graph* g : {&g1, &g2})
    for (double d : degree_vector(*g)) max_degree = std::max(max_degree, d);
  return static_cast<std::size_t>(std::ceil(std::log2(max_degree + 1.0))) + 1;
}

FeatureMatrix structural_features(const Graph& g, std::size_t hops, std::size_t bins, double discount) {
  if (hops < 1 || bins < 1) throw ValidationError("structural features need hops >= 1 and bins >= 1");
  const std::size_t n = g.num_nodes();
  const auto degree = degree_vector(g);
  std::vector<std::size_t> bin_of(n);
  for (std::size_t u = 0; u < n; ++u)
    bin_of[u] = std::min(static_cast<std::size_t>(std::floor(std::log2(degree[u] + 1.0))), bins - 1);

  FeatureMatrix f;
  f.dim = bins;
  f.values.assign(n * bins, 0.0);

  std::vector<std::size_t> seen(n, std::numeric_limits<std::size_t>::max());
  std::vector<NodeId> frontier, next;
  for (NodeId u = 0; u < n; ++u) {
    double* row = f.values.data() + static_cast<std::size_t>(u) * bins;
    seen[u] = u;
    frontier.assign(1, u);
    double weight = 1.0;
    for (std::size_t h = 1; h <= hops && !frontier.empty(); ++h) {
      next.clear();
      for (NodeId x : frontier)
        for (NodeId y : g.neighbors(x))
          if (seen[y] != u) {
            seen[y] = u;
            next.push_back(y);
            row[bin_of[y]] += weight;
          }
      frontier.swap(next);
      weight *= discount;
    }
  }
  return f;
}

AlignmentMatrix builtin_align(const Graph& g1, const Graph& g2, const BuiltinAlignerParams& params) {
  if (g1.num_nodes() != g2.num_nodes()) throw ValidationError("builtin_align expects graphs padded to equal size");
  const std::size_t n = g1.num_nodes();
  if (n == 0) return AlignmentMatrix(0, 0);

  const std::size_t bins = params.bins ? params.bins : default_bin_count(g1, g2);
  const auto f1 = structural_features(g1, params.hops, bins, params.discount);
  const auto f2 = structural_features(g2, params.hops, bins, params.discount);
  const std::size_t k = std::min(n, params.topk ? params.topk : std::max<std::size_t>(1, ceil_log2(n)));

  struct Candidate {
    double dist2;
    NodeId col;
    bool operator<(const Candidate& o) const { return dist2 != o.dist2 ? dist2 < o.dist2 : col < o.col; }
  };

  std::vector<std::vector<AlignmentEntry>> rows(n);
  std::priority_queue<Candidate> best;  // max-heap: worst retained on top
  for (NodeId i = 0; i < n; ++i) {
    const auto fi = f1.row(i);
    best = {};
    for (NodeId j = 0; j < n; ++j) {
      const auto fj = f2.row(j);
      const double bound = best.size() == k ? best.top().dist2 : std::numeric_limits<double>::infinity();
      double d2 = 0.0;
      for (std::size_t b = 0; b < bins && d2 <= bound; ++b) {
        const double diff = fi[b] - fj[b];
        d2 += diff * diff;
      }
      if (best.size() < k) {
        best.push({d2, j});
      } else if (d2 < bound) {
        best.pop();
        best.push({d2, j});
      }
    }
    auto& row = rows[i];
    const bool isolated = g1.hop_degree(i) == 0;
    while (!best.empty()) {
      const auto c = best.top();
      best.pop();
      const double score = isolated ? 1.0 / static_cast<double>(k)
                                    : std::max(std::exp(-params.gamma * std::sqrt(c.dist2)),
                                               std::numeric_limits<double>::min());
      row.push_back({c.col, score});
    }
  }
  return AlignmentMatrix::from_rows(n, std::move(rows));
}

AlignmentMatrix external_align(const Graph& g1, const Graph& g2, const ExternalAlignerParams& params) {
  BaseAlignerSpec spec;
  spec.kind = BaseAlignerSpec::Kind::External;
  spec.external = params;
  spec.validate();

  ScratchDir dir(params.workdir);
  const auto graph1 = dir.path() / "graph1.edges";
  const auto graph2 = dir.path() / "graph2.edges";
  const auto output = dir.path() / "alignment.txt";
  const auto log = dir.path() / "aligner.log";
  save_edge_list(graph1.string(), g1);
  save_edge_list(graph2.string(), g2);
  std::filesystem::remove(output);

  std::string command = params.command;
  command = replace_all(command, "{graph1}", shell_quote(graph1.string()));
  command = replace_all(command, "{graph2}", shell_quote(graph2.string()));
  command = replace_all(command, "{output}", shell_quote(output.string()));

  const int raw = std::system(("(" + command + ") >" + shell_quote(log.string()) + " 2>&1").c_str());
  int status = raw;
  if (raw == -1)
    status = -1;
  else if (WIFEXITED(raw))
    status = WEXITSTATUS(raw);
  else if (WIFSIGNALED(raw))
    status = 128 + WTERMSIG(raw);
  if (status != 0) throw ExternalAlignerError(command, status, read_tail(log, 4096));

  std::ifstream in(output);
  if (!in) throw ExternalAlignerError(command, 0, "aligner produced no output file");
  try {
    return read_alignment(in, g1.num_nodes(), g2.num_nodes(), output.string());
  } catch (const ParseError& e) {
    throw ExternalOutputError(std::string("unparseable external aligner output: ") + e.what());
  }
}

AlignmentMatrix base_align(const Graph& g1, const Graph& g2, const BaseAlignerSpec& spec) {
  spec.validate();
  if (spec.kind == BaseAlignerSpec::Kind::External) return external_align(g1, g2, spec.external);
  return builtin_align(g1, g2, spec.builtin);
}

}  // namespace caper
