#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lipvi/mdp.hpp"

namespace lipvi {

struct Trajectory {
  std::vector<TransitionDataset::Row> steps;
};

/// Groups rows by episode tag, ordered by t.
std::vector<Trajectory> split_trajectories(const TransitionDataset& dataset);

struct IsEstimate {
  double estimate = 0.0;
  std::vector<double> weighted_returns;  // w(tau) * R(tau), one per trajectory
  std::vector<double> weights;
  double standard_error = 0.0;
  /// sum w / max w; the number of trajectories carrying the estimate.
  double effective_sample_size = 0.0;
};

/// Trajectory-wise importance sampling:
///   mean over tau of  (sum_t gamma^t r_t) * prod_t pi(a_t|s_t) / pi0(a_t|s_t).
/// Throws zero_behavior_density, empty_input.
IsEstimate is_estimate(std::span<const Trajectory> trajectories, const Policy& behavior, const Policy& target,
                       double gamma);

/// mean - range * sqrt(ln(1/delta) / (2m)). Throws invalid_delta, empty_input.
double hoeffding_lower(std::span<const double> weighted_returns, double value_range, double delta);

}  // namespace lipvi
