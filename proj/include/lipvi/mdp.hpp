#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lipvi/metric.hpp"
#include "lipvi/random.hpp"

namespace lipvi {

/// Stochastic or deterministic decision rule a ~ pi(.|s).
class Policy {
 public:
  enum class Kind { gaussian_linear, constant, discrete_table, pendulum_swingup };

  struct TableEntry {
    std::vector<double> state;
    std::vector<std::vector<double>> actions;
    std::vector<double> probs;
  };

  /// a = gain * s + bias + xi, xi ~ N(0, sigma^2), applied per state coordinate
  /// (state and action dimensions are equal).
  static Policy gaussian_linear(double gain, double bias, double sigma, std::size_t action_dim = 1);
  static Policy constant(std::vector<double> action);
  /// Finite action sets keyed by exact state match.
  static Policy discrete_table(std::vector<TableEntry> entries);
  /// Energy-pumping swing-up blended into a PD balance controller, torque
  /// clipped to [-2, 2]; `noise_sigma` adds Gaussian torque noise before the
  /// clip (0 = the deterministic controller).
  static Policy pendulum_swingup(double noise_sigma = 0.0);

  Kind kind() const { return kind_; }
  std::size_t action_dim() const { return action_dim_; }
  bool deterministic() const;
  double sigma() const { return sigma_; }
  double gain() const { return gain_; }
  double bias() const { return bias_; }
  const std::vector<double>& constant_action() const { return constant_; }
  const std::vector<TableEntry>& table() const { return table_; }

  /// Noise-free action at s (the mode for the Gaussian kinds).
  std::vector<double> mean_action(std::span<const double> s) const;

  /// Lookup for discrete_table; throws invalid_argument when s is not listed.
  const TableEntry& entry(std::span<const double> s) const;

  /// log pi(a|s) for the kinds with a density (gaussian_linear, pendulum with
  /// noise, discrete_table). -inf where the density vanishes.
  double log_density(std::span<const double> s, std::span<const double> a) const;

  std::string describe() const;

 private:
  Kind kind_ = Kind::constant;
  std::size_t action_dim_ = 0;
  double gain_ = 0.0;
  double bias_ = 0.0;
  double sigma_ = 0.0;
  std::vector<double> constant_;
  std::vector<TableEntry> table_;
};

std::vector<double> sample_action(const Policy& policy, std::span<const double> s, Rng& rng);

/// Deterministic simulator. Transitions and rewards are pure functions of
/// (s, a).
class Environment {
 public:
  enum class Kind { synthetic_linear, pendulum };

  /// 1-D linear system T(s,a) = 0.8 s - 0.4 a - 0.1 whose reward is the
  /// reverse Bellman error of Q(s,a) = f(s) + f(a - pi/2),
  /// f(x) = sqrt(x^2 + x sin x + 1), under the target policy mean
  /// a = gain * s + bias.
  static Environment synthetic(double gamma = 0.95, double target_gain = 1.5, double target_bias = -0.1);
  /// Torque-limited pendulum, state (cos th, sin th, th_dot).
  static Environment pendulum();

  Kind kind() const { return kind_; }
  std::size_t state_dim() const { return kind_ == Kind::pendulum ? 3 : 1; }
  std::size_t action_dim() const { return 1; }
  double reward_gamma() const { return gamma_; }
  double target_gain() const { return target_gain_; }
  double target_bias() const { return target_bias_; }
  std::string name() const;

  std::vector<double> sample_initial_state(Rng& rng) const;

  /// Policies used by the experiments for this environment.
  Policy default_target() const;
  Policy default_behavior(double behavior_sigma) const;
  double default_behavior_sigma() const;

  /// Known Q for the synthetic environment (the function the reward is built
  /// from). Throws invalid_argument for other kinds.
  double synthetic_q(double s, double a) const;

 private:
  Kind kind_ = Kind::synthetic_linear;
  double gamma_ = 0.95;
  double target_gain_ = 1.5;
  double target_bias_ = -0.1;
};

/// Environment lookup by CLI name ("synthetic", "pendulum").
std::optional<Environment> environment_by_name(const std::string& name, double gamma = 0.95);

struct StepResult {
  std::vector<double> s_next;
  double reward;
};

StepResult step(const Environment& env, std::span<const double> s, std::span<const double> a);

namespace synthetic {
double f(double x);
inline constexpr double kHalfPi = 1.57079632679489661923;
}  // namespace synthetic

namespace pendulum {
inline constexpr double kGravity = 10.0;
inline constexpr double kMass = 1.0;
inline constexpr double kLength = 1.0;
inline constexpr double kDt = 0.05;
inline constexpr double kMaxSpeed = 8.0;
inline constexpr double kMaxTorque = 2.0;
double wrap_angle(double theta);
double controller_torque(std::span<const double> s);
}  // namespace pendulum

/// Logged transitions (s_i, a_i, r_i, s'_i) with optional (episode, t) tags.
class TransitionDataset {
 public:
  struct Row {
    std::vector<double> s;
    std::vector<double> a;
    double r = 0.0;
    std::vector<double> s_next;
    std::int64_t episode = -1;
    std::int64_t t = -1;
  };

  TransitionDataset() = default;
  TransitionDataset(std::size_t state_dim, std::size_t action_dim) : state_dim_(state_dim), action_dim_(action_dim) {}

  /// Throws dimension_mismatch / invalid_argument for inconsistent or
  /// non-finite rows.
  void add(Row row);

  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }
  std::size_t state_dim() const { return state_dim_; }
  std::size_t action_dim() const { return action_dim_; }
  const Row& operator[](std::size_t i) const { return rows_[i]; }
  const std::vector<Row>& rows() const { return rows_; }

  Point point(std::size_t i) const;
  std::vector<Point> points() const;

  /// Rows [0, count) as a new dataset.
  TransitionDataset prefix(std::size_t count) const;
  /// Dataset with every reward negated.
  TransitionDataset negated() const;

 private:
  std::size_t state_dim_ = 0;
  std::size_t action_dim_ = 0;
  std::vector<Row> rows_;
};

/// n_trajectories episodes of `horizon` steps from the initial distribution
/// under `behavior`. Episode e uses its own RNG derived from (seed, e).
TransitionDataset collect(const Environment& env, const Policy& behavior, std::size_t n_trajectories,
                          std::size_t horizon, std::uint64_t seed);

struct GroundTruth {
  double value;
  double standard_error;
  double truncation_tolerance;  // gamma^H * max|r| / (1 - gamma), max over rollouts
  std::size_t rollouts;
  std::size_t horizon;
};

/// Monte Carlo estimate of E[sum_{t<H} gamma^t r_t] from the initial
/// distribution under `target`.
GroundTruth ground_truth_return(const Environment& env, const Policy& target, double gamma,
                                std::size_t n_rollouts, std::size_t horizon, std::uint64_t seed);

/// N0 points (s0, a0) with s0 ~ mu0 and a0 ~ target(.|s0).
std::vector<Point> sample_init_points(const Environment& env, const Policy& target, std::size_t count,
                                      std::uint64_t seed);

}  // namespace lipvi
