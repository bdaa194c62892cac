#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lipvi/error.hpp"
#include "lipvi/mdp.hpp"
#include "lipvi/metric.hpp"

namespace lipvi {

/// Empirical Bellman operator with the target-policy actions at every logged
/// next state drawn once and stored:
///
///   B Q(x_i) = r_i + gamma * sum_k w_ik Q(x'_ik),   x'_ik = (s'_i, a'_ik).
///
/// For sampled policies the support of row i is its D draws with w = 1/D;
/// deterministic policies keep one point with w = 1. Discrete tables use their exact action
/// distribution. Immutable after freeze().
class FrozenBellman {
 public:
  std::size_t size() const { return rewards_.size(); }
  double gamma() const { return gamma_; }
  std::size_t action_samples() const { return action_samples_; }
  std::uint64_t seed() const { return seed_; }
  bool stochastic_policy() const { return stochastic_; }
  std::size_t state_dim() const { return state_dim_; }
  std::size_t action_dim() const { return action_dim_; }

  const PointMatrix& anchors() const { return anchors_; }
  std::span<const double> rewards() const { return rewards_; }
  double reward(std::size_t i) const { return rewards_.at(i); }
  Point anchor(std::size_t i) const;

  /// Row i's next-point support as [begin, end) into next_points()/weights().
  std::size_t support_begin(std::size_t i) const { return offsets_[i]; }
  std::size_t support_end(std::size_t i) const { return offsets_[i + 1]; }
  const PointMatrix& next_points() const { return next_; }
  std::span<const double> weights() const { return weights_; }
  std::vector<Point> support(std::size_t i) const;
  std::size_t total_support() const { return weights_.size(); }

  /// Copy with rewards negated (same frozen samples).
  FrozenBellman negated() const;

  /// Builds an operator directly from explicit supports; used by tests and
  /// the oracle tooling. `supports[i]` pairs next points with weights.
  static FrozenBellman from_rows(std::vector<Point> anchors, std::vector<double> rewards,
                                 std::vector<std::vector<std::pair<Point, double>>> supports, double gamma);

 private:
  friend FrozenBellman freeze(const TransitionDataset&, const Policy&, std::size_t, double, std::uint64_t);

  double gamma_ = 0.0;
  std::size_t action_samples_ = 1;
  std::uint64_t seed_ = 0;
  bool stochastic_ = false;
  std::size_t state_dim_ = 0;
  std::size_t action_dim_ = 0;
  PointMatrix anchors_;
  std::vector<double> rewards_;
  std::vector<std::size_t> offsets_{0};
  PointMatrix next_;
  std::vector<double> weights_;
};

/// Draws D target actions per logged next state (RNG per row, derived from
/// seed), so the result does not depend on evaluation order.
FrozenBellman freeze(const TransitionDataset& dataset, const Policy& target, std::size_t action_samples,
                     double gamma, std::uint64_t seed);

/// B Q(x_i) given Q's values at every support point (indexed like
/// next_points()).
double apply_values(const FrozenBellman& fb, std::span<const double> next_values, std::size_t i);

/// B Q(x_i) for a callable Q(const Point&) -> double.
template <class Q>
double apply(const FrozenBellman& fb, Q&& q, std::size_t i) {
  if (i >= fb.size()) throw Error(Errc::index_out_of_range, "row index out of range");
  double acc = 0.0;
  const auto& next = fb.next_points();
  for (std::size_t k = fb.support_begin(i); k < fb.support_end(i); ++k) {
    auto c = next.row(k);
    Point p(std::vector<double>(c.begin(), c.end()), fb.state_dim(), fb.action_dim());
    acc += fb.weights()[k] * q(p);
  }
  return fb.reward(i) + fb.gamma() * acc;
}

}  // namespace lipvi
