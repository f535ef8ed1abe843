#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "caper/graph.hpp"

namespace caper {

struct AlignmentEntry {
  NodeId col;
  double score;

  friend bool operator==(const AlignmentEntry&, const AlignmentEntry&) = default;
};

struct AlignmentTriplet {
  NodeId row;
  NodeId col;
  double score;
};

/// Sparse nonnegative similarity matrix between G1 nodes (rows) and G2 nodes
/// (columns), stored row-compressed with columns ascending in each row.
/// Stored entries may hold 0; they still count as support.
class AlignmentMatrix {
 public:
  AlignmentMatrix() = default;
  AlignmentMatrix(std::size_t n1, std::size_t n2) : n1_(n1), n2_(n2), offsets_(n1 + 1, 0) {}

  // Each row is sorted by column. Throws ValidationError on a duplicate
  // column, an out-of-range column or a negative / non-finite score.
  static AlignmentMatrix from_rows(std::size_t n2, std::vector<std::vector<AlignmentEntry>> rows);
  static AlignmentMatrix from_triplets(std::size_t n1, std::size_t n2, std::span<const AlignmentTriplet> triplets);
  static AlignmentMatrix identity(std::size_t n);

  std::size_t n1() const noexcept { return n1_; }
  std::size_t n2() const noexcept { return n2_; }
  std::size_t nnz() const noexcept { return entries_.size(); }
  std::size_t max_row_entries() const noexcept;

  std::span<const AlignmentEntry> row(NodeId i) const noexcept {
    return {entries_.data() + offsets_[i], entries_.data() + offsets_[i + 1]};
  }
  // 0 when not stored.
  double at(NodeId i, NodeId j) const noexcept;

  // Keeps rows < n1 and columns < n2, dropping padding.
  AlignmentMatrix stripped(std::size_t n1, std::size_t n2) const;
  AlignmentMatrix scaled(double factor) const;

  std::vector<AlignmentTriplet> triplets() const;

  void validate() const;

  friend bool operator==(const AlignmentMatrix&, const AlignmentMatrix&) = default;

 private:
  std::size_t n1_ = 0;
  std::size_t n2_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<AlignmentEntry> entries_;
};

/// Reads "i j s" lines over dense node ids. '#' lines are comments.
AlignmentMatrix read_alignment(std::istream& in, std::size_t n1, std::size_t n2,
                               const std::string& source = "<stream>");
AlignmentMatrix load_alignment(const std::string& path, std::size_t n1, std::size_t n2);

// Same format with node labels; ids are looked up in the given label tables.
// Unknown labels are a ParseError.
AlignmentMatrix read_labeled_alignment(std::istream& in, std::span<const std::string> labels1,
                                       std::span<const std::string> labels2, const std::string& source = "<stream>");

void write_alignment(std::ostream& out, const AlignmentMatrix& s, std::span<const std::string> labels1 = {},
                     std::span<const std::string> labels2 = {});
void save_alignment(const std::string& path, const AlignmentMatrix& s, std::span<const std::string> labels1 = {},
                    std::span<const std::string> labels2 = {});

}  // namespace caper
