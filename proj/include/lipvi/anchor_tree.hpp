#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace lipvi {

/// Exact solver for  min_j (offset_j + scale * ||x - a_j||)  over a fixed set
/// of anchors a_j. A k-d tree stores, per node, the bounding box of its
/// anchors and the smallest offset below it; a node is skipped only when
/// min_offset + scale * dist(x, box) exceeds the best value found by more than
/// floating-point noise, so the result is bit-identical to a linear scan.
///
/// Offsets change every value-iteration sweep while the anchors do not;
/// set_offsets() refreshes the node minima in O(n).
class AnchorTree {
 public:
  struct Hit {
    double value;
    std::size_t index;  // smallest anchor index among value ties
  };

  AnchorTree() = default;
  AnchorTree(std::span<const double> coords, std::size_t dim, std::size_t leaf_size = 12);

  std::size_t size() const { return n_; }
  std::size_t dim() const { return dim_; }

  void set_offsets(std::span<const double> offsets);
  /// `hint` (an anchor index, or npos) seeds the search with that anchor's
  /// value; a good hint only speeds up pruning, the result is unchanged.
  Hit min_cone(std::span<const double> x, double scale, std::size_t hint = npos) const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  struct Node {
    std::uint32_t begin;
    std::uint32_t end;
    std::int32_t left;
    std::int32_t right;
    double min_offset;
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end);
  double refresh(std::int32_t node);
  double box_distance(std::int32_t node, const double* x) const;
  void search(std::int32_t node, const double* x, double scale, Hit& best) const;

  std::size_t n_ = 0;
  std::size_t dim_ = 0;
  std::size_t leaf_size_ = 12;
  std::vector<double> points_;         // permuted copy, row-major
  std::vector<std::uint32_t> perm_;    // permuted position -> original index
  std::vector<std::uint32_t> where_;   // original index -> permuted position
  std::vector<double> offsets_;        // permuted order
  std::vector<double> lo_, hi_;        // per-node boxes
  std::vector<Node> nodes_;
};

/// Linear-scan reference for AnchorTree::min_cone over the same inputs.
AnchorTree::Hit min_cone_scan(std::span<const double> coords, std::size_t dim,
                              std::span<const double> offsets, std::span<const double> x, double scale);

}  // namespace lipvi
