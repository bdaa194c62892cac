#include "lipvi/anchor_tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "lipvi/error.hpp"
#include "lipvi/metric.hpp"

namespace lipvi {

namespace {

// Pruning margin. A node is skipped only if its lower bound beats the current
// best by more than this, which dominates the rounding error of the bound.
inline double prune_margin(double best, double box_term) {
  return 1e-10 * (1.0 + std::abs(best) + box_term);
}

inline bool better(double v, std::size_t idx, const AnchorTree::Hit& best) {
  return v < best.value || (v == best.value && idx < best.index);
}

}  // namespace

AnchorTree::AnchorTree(std::span<const double> coords, std::size_t dim, std::size_t leaf_size)
    : dim_(dim), leaf_size_(std::max<std::size_t>(leaf_size, 1)) {
  if (dim == 0) throw Error(Errc::invalid_argument, "anchor dimension must be positive");
  if (coords.size() % dim != 0) throw Error(Errc::dimension_mismatch, "coordinate block is not a multiple of dim");
  n_ = coords.size() / dim;
  if (n_ == 0) throw Error(Errc::empty_input, "no anchors");
  perm_.resize(n_);
  std::iota(perm_.begin(), perm_.end(), 0u);
  points_.assign(coords.begin(), coords.end());  // original order during build
  nodes_.reserve(2 * n_ / leaf_size_ + 2);
  build(0, static_cast<std::uint32_t>(n_));

  std::vector<double> permuted(n_ * dim_);
  for (std::size_t p = 0; p < n_; ++p)
    std::copy_n(coords.begin() + perm_[p] * dim_, dim_, permuted.begin() + p * dim_);
  points_ = std::move(permuted);
  where_.resize(n_);
  for (std::size_t p = 0; p < n_; ++p) where_[perm_[p]] = static_cast<std::uint32_t>(p);
  offsets_.assign(n_, 0.0);
  refresh(0);
}

std::int32_t AnchorTree::build(std::uint32_t begin, std::uint32_t end) {
  auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back({begin, end, -1, -1, 0.0});
  lo_.resize(nodes_.size() * dim_);
  hi_.resize(nodes_.size() * dim_);
  double* lo = lo_.data() + id * dim_;
  double* hi = hi_.data() + id * dim_;
  std::fill(lo, lo + dim_, std::numeric_limits<double>::infinity());
  std::fill(hi, hi + dim_, -std::numeric_limits<double>::infinity());
  for (std::uint32_t p = begin; p < end; ++p) {
    const double* x = points_.data() + perm_[p] * dim_;
    for (std::size_t k = 0; k < dim_; ++k) {
      lo[k] = std::min(lo[k], x[k]);
      hi[k] = std::max(hi[k], x[k]);
    }
  }
  if (end - begin <= leaf_size_) return id;

  std::size_t axis = 0;
  double widest = -1.0;
  for (std::size_t k = 0; k < dim_; ++k) {
    if (hi[k] - lo[k] > widest) {
      widest = hi[k] - lo[k];
      axis = k;
    }
  }
  if (widest <= 0.0) return id;  // all coincident

  std::uint32_t mid = begin + (end - begin) / 2;
  const double* base = points_.data();
  std::nth_element(perm_.begin() + begin, perm_.begin() + mid, perm_.begin() + end,
                   [base, axis, this](std::uint32_t a, std::uint32_t b) {
                     return base[a * dim_ + axis] < base[b * dim_ + axis];
                   });
  std::int32_t left = build(begin, mid);
  std::int32_t right = build(mid, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

void AnchorTree::set_offsets(std::span<const double> offsets) {
  if (offsets.size() != n_) throw Error(Errc::length_mismatch, "offset count differs from anchor count");
  for (std::size_t p = 0; p < n_; ++p) offsets_[p] = offsets[perm_[p]];
  refresh(0);
}

double AnchorTree::refresh(std::int32_t id) {
  Node& node = nodes_[id];
  double m;
  if (node.left < 0) {
    m = std::numeric_limits<double>::infinity();
    for (std::uint32_t p = node.begin; p < node.end; ++p) m = std::min(m, offsets_[p]);
  } else {
    m = std::min(refresh(node.left), refresh(node.right));
  }
  nodes_[id].min_offset = m;
  return m;
}

double AnchorTree::box_distance(std::int32_t id, const double* x) const {
  const double* lo = lo_.data() + id * dim_;
  const double* hi = hi_.data() + id * dim_;
  double acc = 0.0;
  for (std::size_t k = 0; k < dim_; ++k) {
    double d = 0.0;
    if (x[k] < lo[k]) d = lo[k] - x[k];
    else if (x[k] > hi[k]) d = x[k] - hi[k];
    acc += d * d;
  }
  return std::sqrt(acc);
}

void AnchorTree::search(std::int32_t id, const double* x, double scale, Hit& best) const {
  const Node& node = nodes_[id];
  if (node.left < 0) {
    for (std::uint32_t p = node.begin; p < node.end; ++p) {
      double v = offsets_[p] + scale * euclid(x, points_.data() + p * dim_, dim_);
      if (better(v, perm_[p], best)) best = {v, perm_[p]};
    }
    return;
  }
  double box_l = scale * box_distance(node.left, x);
  double box_r = scale * box_distance(node.right, x);
  double lb_l = nodes_[node.left].min_offset + box_l;
  double lb_r = nodes_[node.right].min_offset + box_r;
  std::int32_t first = node.left, second = node.right;
  double lb_first = lb_l, lb_second = lb_r, box_first = box_l, box_second = box_r;
  if (lb_r < lb_l) {
    std::swap(first, second);
    std::swap(lb_first, lb_second);
    std::swap(box_first, box_second);
  }
  if (!(lb_first > best.value + prune_margin(best.value, box_first))) search(first, x, scale, best);
  if (!(lb_second > best.value + prune_margin(best.value, box_second))) search(second, x, scale, best);
}

AnchorTree::Hit AnchorTree::min_cone(std::span<const double> x, double scale, std::size_t hint) const {
  if (x.size() != dim_) throw Error(Errc::dimension_mismatch, "query dimension differs from anchors");
  Hit best{std::numeric_limits<double>::infinity(), std::numeric_limits<std::size_t>::max()};
  if (hint < n_) {
    std::size_t p = where_[hint];
    best = {offsets_[p] + scale * euclid(x.data(), points_.data() + p * dim_, dim_), hint};
  }
  search(0, x.data(), scale, best);
  return best;
}

AnchorTree::Hit min_cone_scan(std::span<const double> coords, std::size_t dim, std::span<const double> offsets,
                              std::span<const double> x, double scale) {
  if (x.size() != dim) throw Error(Errc::dimension_mismatch, "query dimension differs from anchors");
  std::size_t n = offsets.size();
  AnchorTree::Hit best{std::numeric_limits<double>::infinity(), std::numeric_limits<std::size_t>::max()};
  for (std::size_t j = 0; j < n; ++j) {
    double v = offsets[j] + scale * euclid(x.data(), coords.data() + j * dim, dim);
    if (better(v, j, best)) best = {v, j};
  }
  return best;
}

}  // namespace lipvi
