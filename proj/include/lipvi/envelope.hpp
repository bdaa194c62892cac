#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "lipvi/anchor_tree.hpp"
#include "lipvi/metric.hpp"

namespace lipvi {

enum class Direction { upper, lower };

/// Closed-form Lipschitz envelopes over anchors x_j with labels q_j:
///
///   upper:  Q(x) = min_j (q_j + eta d(x, x_j))   largest eta-Lipschitz f with f(x_j) <= q_j
///   lower:  Q(x) = max_j (q_j - eta d(x, x_j))   smallest eta-Lipschitz f with f(x_j) >= q_j
///
/// Both are evaluated as a min-cone problem on the embedded anchors (the lower
/// envelope as -min_j(-q_j + eta d)), which makes negation duality exact.
class EnvelopeKernel {
 public:
  EnvelopeKernel() = default;
  /// `anchors` already embedded. Builds a search tree for large anchor sets.
  EnvelopeKernel(PointMatrix anchors, double eta, Direction direction);

  std::size_t size() const { return anchors_.rows(); }
  double eta() const { return eta_; }
  Direction direction() const { return direction_; }
  const PointMatrix& anchors() const { return anchors_; }

  void set_labels(std::span<const double> q);
  std::span<const double> labels() const { return q_; }

  /// Envelope at an embedded query point; *argmin (if given) receives the
  /// binding anchor, smallest index on ties. `hint` is a likely binding
  /// anchor (e.g. the previous query's); it never changes the result.
  double eval(std::span<const double> x, std::size_t* argmin = nullptr,
              std::size_t hint = AnchorTree::npos) const;
  /// Same value by exhaustive scan; the reference for eval().
  double eval_scan(std::span<const double> x, std::size_t* argmin = nullptr) const;

  /// out[i] = eval(rows[i]).
  void eval_rows(const PointMatrix& rows, std::span<double> out) const;

  static constexpr std::size_t kTreeThreshold = 48;

 private:
  PointMatrix anchors_;
  double eta_ = 1.0;
  Direction direction_ = Direction::upper;
  std::vector<double> q_;
  std::vector<double> offsets_;
  std::unique_ptr<AnchorTree> tree_;
};

/// Anchors, labels, radius and direction of one envelope function.
/// Immutable; all evaluation functions are safe to call concurrently.
class EnvelopeState {
 public:
  /// Throws empty_input, invalid_argument (eta <= 0, non-finite q) or
  /// length_mismatch.
  EnvelopeState(std::vector<Point> anchors, std::vector<double> q, double eta, Direction direction,
                Metric metric = Metric::euclidean());

  std::span<const Point> anchors() const { return anchors_; }
  std::span<const double> q() const { return q_; }
  double eta() const { return eta_; }
  Direction direction() const { return direction_; }
  const Metric& metric() const { return metric_; }
  const EnvelopeKernel& kernel() const { return *kernel_; }

 private:
  std::vector<Point> anchors_;
  std::vector<double> q_;
  double eta_;
  Direction direction_;
  Metric metric_;
  std::shared_ptr<EnvelopeKernel> kernel_;
};

/// Envelope value at x. Throws dimension_mismatch.
double eval(const EnvelopeState& state, const Point& x);

/// Index of the binding anchor at x (smallest index on ties).
std::size_t binding_anchor(const EnvelopeState& state, const Point& x);

/// Element-wise eval over xs.
std::vector<double> eval_batch(const EnvelopeState& state, std::span<const Point> xs);

/// Mean of eval over the initial points, summed in input order. Throws
/// empty_input.
double expected_value(const EnvelopeState& state, std::span<const Point> init_points);

/// Indices i with upper[i] < lower[i] - 1e-12. Throws length_mismatch.
std::vector<std::size_t> crossing_indices(std::span<const double> upper, std::span<const double> lower);

}  // namespace lipvi
