#pragma once

#include <cstddef>
#include <cstdint>

#include "lipvi/mdp.hpp"
#include "lipvi/metric.hpp"

namespace lipvi {

/// Largest empirical slope over all row pairs. Always an under-estimate of
/// the true Lipschitz norm; row capping makes it more so.
struct LipschitzEstimate {
  double value = 0.0;
  std::size_t rows_used = 0;
  bool capped = false;
};

inline constexpr std::size_t kDefaultRowCap = 5000;

/// max_{i != j} |r_i - r_j| / d(x_i, x_j). Throws too_few_rows or
/// duplicate_conflict (coincident points with different rewards).
LipschitzEstimate estimate_reward_lipschitz(const TransitionDataset& dataset, const Metric& metric,
                                            std::size_t row_cap = kDefaultRowCap, std::uint64_t seed = 0);

/// max_{i != j} d_s(s'_i, s'_j) / d_x(x_i, x_j).
LipschitzEstimate estimate_transition_lipschitz(const TransitionDataset& dataset, const Metric& metric_x,
                                                const Metric& metric_s,
                                                std::size_t row_cap = kDefaultRowCap, std::uint64_t seed = 0);

/// Bound on ||Q||_Lip from reward and transition norms: eta_r / (1 - gamma eta_T).
/// Throws contraction_violated when gamma * eta_T >= 1.
double propagate(double eta_r, double eta_t, double gamma);

/// propagate() gated on the metric's separability; throws invalid_argument
/// when the metric does not assert it.
double propagate_checked(double eta_r, double eta_t, double gamma, const Metric& metric);

}  // namespace lipvi
