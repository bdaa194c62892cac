#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lipvi/bellman.hpp"
#include "lipvi/envelope.hpp"
#include "lipvi/mdp.hpp"
#include "lipvi/metric.hpp"

namespace lipvi {

struct LviConfig {
  double gamma = 0.95;
  double eta = 2.0;
  std::size_t max_iters = 100;
  /// Stop when max_i |dq_i| <= tol in both chains. Unset means
  /// 1e-6 * (1 + max_i |r_i|).
  std::optional<double> tol;
  /// Rows updated per iteration (n_B); 0 or >= n means full updates.
  std::size_t subsample = 0;
  /// Target-action draws per next state (D).
  std::size_t action_samples = 128;
  /// Number of initial state-action points (N0) the CLI draws.
  std::size_t init_points = 100;
  double kappa = 1.1;
  std::size_t max_escalations = 20;
  std::uint64_t seed = 0;

  /// Throws invalid_gamma / invalid_argument.
  void validate() const;
};

struct TraceEntry {
  std::size_t t;
  double r_upper;
  double r_lower;
  double max_dq;  // NaN for t = 0
};

enum class DiagnosisOutcome { passed, escalated, exhausted };
std::string to_string(DiagnosisOutcome d);

enum class Diagnosis { pass, reject };

struct BoundsReport {
  double upper = 0.0;
  double lower = 0.0;
  double eta_initial = 0.0;
  double eta_used = 0.0;
  std::size_t escalations = 0;
  std::size_t iterations_upper = 0;
  std::size_t iterations_lower = 0;
  std::size_t iterations = 0;
  std::vector<TraceEntry> trace;
  DiagnosisOutcome diagnosis = DiagnosisOutcome::passed;
  std::vector<std::size_t> crossings;  // from the last rejected attempt
  double covering_radius = 0.0;
  double gap_bound = 0.0;
  double tol = 0.0;
  std::size_t rows = 0;
  std::size_t subsample_used = 0;
  std::size_t action_samples = 0;
  bool stochastic_target = false;
  std::size_t feature_fallbacks = 0;
  std::vector<double> upper_q;
  std::vector<double> lower_q;
  LviConfig config;

  double midpoint() const { return 0.5 * (upper + lower); }
};

/// Starting labels that make the upper chain non-increasing:
///   q0_i = (r_i + gamma eta E_k[d(x_i, x'_ik)]) / (1 - gamma).
std::vector<double> init_upper(const FrozenBellman& fb, double eta, const Metric& metric);
/// Mirror image: q0_i = (r_i - gamma eta E_k[d(x_i, x'_ik)]) / (1 - gamma).
std::vector<double> init_lower(const FrozenBellman& fb, double eta, const Metric& metric);

/// One full sweep: q'_i = B Q_t(x_i), Q_t the envelope of (anchors, q_t).
std::vector<double> iterate_full(std::span<const double> q, const FrozenBellman& fb, double eta,
                                 const Metric& metric, Direction direction);

/// One subsampled sweep: the envelope uses anchors in `subset` only and
/// q'_i = min{q_i, B Q_t(x_i)} (max for lower) for i in subset; other entries
/// are copied. Throws empty_subset / index_out_of_range.
std::vector<double> iterate_subsampled(std::span<const double> q, const FrozenBellman& fb, double eta,
                                       const Metric& metric, Direction direction,
                                       std::span<const std::size_t> subset);

/// Reject iff some upper value falls strictly below the lower value at the
/// same index. Pass the envelopes evaluated at the anchors.
Diagnosis diagnose(std::span<const double> upper_values, std::span<const double> lower_values);

/// Upper and lower envelope values at every anchor.
struct AnchorValues {
  std::vector<double> upper;
  std::vector<double> lower;
};
AnchorValues anchor_envelope_values(const FrozenBellman& fb, std::span<const double> upper_q,
                                    std::span<const double> lower_q, double eta, const Metric& metric);

/// Lipschitz value iteration on a frozen operator: runs the upper and lower
/// chains together, diagnoses every iteration, and on rejection restarts both
/// chains with eta *= kappa. cfg.seed drives the subsample draws only.
/// Throws invalid_gamma / empty_input; exhaustion is reported through
/// BoundsReport::diagnosis rather than thrown.
BoundsReport run(const FrozenBellman& fb, const LviConfig& cfg, std::span<const Point> init_points,
                 const Metric& metric = Metric::euclidean());

/// Freezes the dataset under `target` with cfg.seed, then runs.
BoundsReport run(const TransitionDataset& dataset, const Policy& target, const LviConfig& cfg,
                 std::span<const Point> init_points, const Metric& metric = Metric::euclidean());

/// Uniform draw of `count` distinct indices from [0, n), sorted.
std::vector<std::size_t> draw_subset(std::size_t n, std::size_t count, std::uint64_t seed, std::uint64_t iteration);

}  // namespace lipvi
