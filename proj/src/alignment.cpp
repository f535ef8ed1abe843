#include "caper/alignment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unordered_map>

#include "caper/error.hpp"

namespace caper {

namespace {

void check_score(double s, NodeId i, NodeId j) {
  if (!std::isfinite(s) || s < 0.0)
    throw ValidationError("invalid score at (" + std::to_string(i) + "," + std::to_string(j) + ")");
}

template <typename Resolve>
AlignmentMatrix parse_triplets(std::istream& in, std::size_t n1, std::size_t n2, const std::string& source,
                               Resolve resolve) {
  std::vector<AlignmentTriplet> triplets;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string a, b, c, extra;
    if (!(ss >> a)) continue;
    if (a.front() == '#') continue;
    if (!(ss >> b >> c) || (ss >> extra)) throw ParseError(source, line_no, "expected 'i j s'");
    double score = 0.0;
    const auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), score);
    if (ec != std::errc() || ptr != c.data() + c.size()) throw ParseError(source, line_no, "bad score '" + c + "'");
    if (!std::isfinite(score) || score < 0.0) throw ParseError(source, line_no, "score must be finite and >= 0");
    triplets.push_back({resolve(a, 1, line_no), resolve(b, 2, line_no), score});
  }
  if (in.bad()) throw IoError("read failure on " + source);
  try {
    return AlignmentMatrix::from_triplets(n1, n2, triplets);
  } catch (const ValidationError& e) {
    throw ParseError(source, 0, e.what());
  }
}

}  // namespace

AlignmentMatrix AlignmentMatrix::from_rows(std::size_t n2, std::vector<std::vector<AlignmentEntry>> rows) {
  AlignmentMatrix s(rows.size(), n2);
  std::size_t total = 0;
  for (const auto& r : rows) total += r.size();
  s.entries_.reserve(total);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto& r = rows[i];
    std::sort(r.begin(), r.end(), [](const AlignmentEntry& a, const AlignmentEntry& b) { return a.col < b.col; });
    for (std::size_t k = 0; k < r.size(); ++k) {
      if (r[k].col >= n2) throw ValidationError("alignment column out of range in row " + std::to_string(i));
      if (k > 0 && r[k].col == r[k - 1].col)
        throw ValidationError("duplicate alignment entry (" + std::to_string(i) + "," + std::to_string(r[k].col) +
                              ")");
      check_score(r[k].score, static_cast<NodeId>(i), r[k].col);
    }
    s.entries_.insert(s.entries_.end(), r.begin(), r.end());
    s.offsets_[i + 1] = s.entries_.size();
  }
  return s;
}

AlignmentMatrix AlignmentMatrix::from_triplets(std::size_t n1, std::size_t n2,
                                               std::span<const AlignmentTriplet> triplets) {
  std::vector<std::vector<AlignmentEntry>> rows(n1);
  for (const auto& t : triplets) {
    if (t.row >= n1) throw ValidationError("alignment row " + std::to_string(t.row) + " out of range");
    rows[t.row].push_back({t.col, t.score});
  }
  return from_rows(n2, std::move(rows));
}

AlignmentMatrix AlignmentMatrix::identity(std::size_t n) {
  std::vector<std::vector<AlignmentEntry>> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i].push_back({static_cast<NodeId>(i), 1.0});
  return from_rows(n, std::move(rows));
}

std::size_t AlignmentMatrix::max_row_entries() const noexcept {
  std::size_t m = 0;
  for (std::size_t i = 0; i < n1_; ++i) m = std::max(m, offsets_[i + 1] - offsets_[i]);
  return m;
}

double AlignmentMatrix::at(NodeId i, NodeId j) const noexcept {
  const auto r = row(i);
  const auto it =
      std::lower_bound(r.begin(), r.end(), j, [](const AlignmentEntry& e, NodeId c) { return e.col < c; });
  return it != r.end() && it->col == j ? it->score : 0.0;
}

AlignmentMatrix AlignmentMatrix::stripped(std::size_t n1, std::size_t n2) const {
  if (n1 > n1_ || n2 > n2_) throw ValidationError("cannot strip to a larger shape");
  AlignmentMatrix s(n1, n2);
  for (NodeId i = 0; i < n1; ++i) {
    for (const auto& e : row(i))
      if (e.col < n2) s.entries_.push_back(e);
    s.offsets_[i + 1] = s.entries_.size();
  }
  return s;
}

AlignmentMatrix AlignmentMatrix::scaled(double factor) const {
  if (!(factor > 0.0) || !std::isfinite(factor)) throw ValidationError("scale factor must be positive");
  AlignmentMatrix s = *this;
  for (auto& e : s.entries_) e.score *= factor;
  return s;
}

std::vector<AlignmentTriplet> AlignmentMatrix::triplets() const {
  std::vector<AlignmentTriplet> out;
  out.reserve(nnz());
  for (NodeId i = 0; i < n1_; ++i)
    for (const auto& e : row(i)) out.push_back({i, e.col, e.score});
  return out;
}

void AlignmentMatrix::validate() const {
  if (offsets_.size() != n1_ + 1 || offsets_.back() != entries_.size())
    throw ValidationError("alignment CSR arrays disagree");
  for (NodeId i = 0; i < n1_; ++i) {
    const auto r = row(i);
    for (std::size_t k = 0; k < r.size(); ++k) {
      if (r[k].col >= n2_) throw ValidationError("alignment column out of range");
      if (k > 0 && r[k].col <= r[k - 1].col) throw ValidationError("alignment row not strictly increasing");
      check_score(r[k].score, i, r[k].col);
    }
  }
}

AlignmentMatrix read_alignment(std::istream& in, std::size_t n1, std::size_t n2, const std::string& source) {
  return parse_triplets(in, n1, n2, source, [&](const std::string& tok, int side, std::size_t line_no) {
    unsigned long long v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
      throw ParseError(source, line_no, "bad node id '" + tok + "'");
    if (v >= (side == 1 ? n1 : n2)) throw ParseError(source, line_no, "node id " + tok + " out of range");
    return static_cast<NodeId>(v);
  });
}

AlignmentMatrix load_alignment(const std::string& path, std::size_t n1, std::size_t n2) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open alignment '" + path + "'");
  return read_alignment(in, n1, n2, path);
}

AlignmentMatrix read_labeled_alignment(std::istream& in, std::span<const std::string> labels1,
                                       std::span<const std::string> labels2, const std::string& source) {
  std::unordered_map<std::string, NodeId> ids1, ids2;
  for (std::size_t i = 0; i < labels1.size(); ++i) ids1.emplace(labels1[i], static_cast<NodeId>(i));
  for (std::size_t j = 0; j < labels2.size(); ++j) ids2.emplace(labels2[j], static_cast<NodeId>(j));
  return parse_triplets(in, labels1.size(), labels2.size(), source,
                        [&](const std::string& tok, int side, std::size_t line_no) {
                          const auto& ids = side == 1 ? ids1 : ids2;
                          const auto it = ids.find(tok);
                          if (it == ids.end()) throw ParseError(source, line_no, "unknown node label '" + tok + "'");
                          return it->second;
                        });
}

void write_alignment(std::ostream& out, const AlignmentMatrix& s, std::span<const std::string> labels1,
                     std::span<const std::string> labels2) {
  out << std::setprecision(17);
  for (NodeId i = 0; i < s.n1(); ++i)
    for (const auto& e : s.row(i))
      out << (labels1.empty() ? std::to_string(i) : labels1[i]) << ' '
          << (labels2.empty() ? std::to_string(e.col) : labels2[e.col]) << ' ' << e.score << '\n';
}

void save_alignment(const std::string& path, const AlignmentMatrix& s, std::span<const std::string> labels1,
                    std::span<const std::string> labels2) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  write_alignment(out, s, labels1, labels2);
  if (!out) throw IoError("write failure on '" + path + "'");
}

}  // namespace caper
