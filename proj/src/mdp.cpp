#include "lipvi/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "lipvi/error.hpp"

namespace lipvi {

namespace {

constexpr double kLog2Pi = 1.83787706640934548356;

void check_finite(std::span<const double> v, const char* what) {
  for (double x : v)
    if (!std::isfinite(x)) throw Error(Errc::invalid_argument, std::string(what) + " must be finite");
}

bool same_vector(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) return false;
  return euclid(a, b) <= kZeroDistance;
}

}  // namespace

// ---------------------------------------------------------------------------
// Policy

Policy Policy::gaussian_linear(double gain, double bias, double sigma, std::size_t action_dim) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw Error(Errc::invalid_argument, "sigma must be >= 0");
  if (!std::isfinite(gain) || !std::isfinite(bias)) throw Error(Errc::invalid_argument, "gain/bias must be finite");
  if (action_dim == 0) throw Error(Errc::invalid_argument, "action_dim must be positive");
  Policy p;
  p.kind_ = Kind::gaussian_linear;
  p.gain_ = gain;
  p.bias_ = bias;
  p.sigma_ = sigma;
  p.action_dim_ = action_dim;
  return p;
}

Policy Policy::constant(std::vector<double> action) {
  if (action.empty()) throw Error(Errc::invalid_argument, "constant policy needs an action");
  check_finite(action, "constant action");
  Policy p;
  p.kind_ = Kind::constant;
  p.action_dim_ = action.size();
  p.constant_ = std::move(action);
  return p;
}

Policy Policy::discrete_table(std::vector<TableEntry> entries) {
  if (entries.empty()) throw Error(Errc::invalid_argument, "discrete table is empty");
  std::size_t adim = 0;
  for (const auto& e : entries) {
    if (e.actions.empty() || e.actions.size() != e.probs.size())
      throw Error(Errc::invalid_argument, "table entry needs one probability per action");
    double total = 0.0;
    for (std::size_t k = 0; k < e.actions.size(); ++k) {
      if (adim == 0) adim = e.actions[k].size();
      if (e.actions[k].size() != adim || adim == 0) throw Error(Errc::dimension_mismatch, "table action dimension");
      if (!(e.probs[k] >= 0.0)) throw Error(Errc::invalid_argument, "table probabilities must be >= 0");
      total += e.probs[k];
    }
    if (std::abs(total - 1.0) > 1e-9) throw Error(Errc::invalid_argument, "table row probabilities must sum to 1");
  }
  Policy p;
  p.kind_ = Kind::discrete_table;
  p.action_dim_ = adim;
  p.table_ = std::move(entries);
  return p;
}

Policy Policy::pendulum_swingup(double noise_sigma) {
  if (!(noise_sigma >= 0.0)) throw Error(Errc::invalid_argument, "noise sigma must be >= 0");
  Policy p;
  p.kind_ = Kind::pendulum_swingup;
  p.action_dim_ = 1;
  p.sigma_ = noise_sigma;
  return p;
}

bool Policy::deterministic() const {
  switch (kind_) {
    case Kind::gaussian_linear:
    case Kind::pendulum_swingup: return sigma_ == 0.0;
    case Kind::constant: return true;
    case Kind::discrete_table:
      return std::all_of(table_.begin(), table_.end(), [](const TableEntry& e) {
        return std::count_if(e.probs.begin(), e.probs.end(), [](double p) { return p > 0.0; }) == 1;
      });
  }
  return false;
}

const Policy::TableEntry& Policy::entry(std::span<const double> s) const {
  for (const auto& e : table_)
    if (same_vector(e.state, s)) return e;
  throw Error(Errc::invalid_argument, "state not present in discrete policy table");
}

std::vector<double> Policy::mean_action(std::span<const double> s) const {
  switch (kind_) {
    case Kind::gaussian_linear: {
      if (s.size() != action_dim_) throw Error(Errc::dimension_mismatch, "gaussian_linear needs state_dim == action_dim");
      std::vector<double> a(action_dim_);
      for (std::size_t k = 0; k < action_dim_; ++k) a[k] = gain_ * s[k] + bias_;
      return a;
    }
    case Kind::constant: return constant_;
    case Kind::pendulum_swingup: return {pendulum::controller_torque(s)};
    case Kind::discrete_table: {
      const auto& e = entry(s);
      auto it = std::max_element(e.probs.begin(), e.probs.end());
      return e.actions[static_cast<std::size_t>(it - e.probs.begin())];
    }
  }
  return {};
}

double Policy::log_density(std::span<const double> s, std::span<const double> a) const {
  if (a.size() != action_dim_) throw Error(Errc::dimension_mismatch, "action dimension mismatch");
  switch (kind_) {
    case Kind::gaussian_linear: {
      auto mu = mean_action(s);
      if (sigma_ == 0.0) return same_vector(mu, a) ? 0.0 : -std::numeric_limits<double>::infinity();
      double acc = 0.0;
      for (std::size_t k = 0; k < action_dim_; ++k) {
        double z = (a[k] - mu[k]) / sigma_;
        acc += -0.5 * z * z - std::log(sigma_) - 0.5 * kLog2Pi;
      }
      return acc;
    }
    case Kind::constant:
      return same_vector(constant_, a) ? 0.0 : -std::numeric_limits<double>::infinity();
    case Kind::discrete_table: {
      const auto& e = entry(s);
      for (std::size_t k = 0; k < e.actions.size(); ++k)
        if (same_vector(e.actions[k], a)) return e.probs[k] > 0.0 ? std::log(e.probs[k]) : -std::numeric_limits<double>::infinity();
      return -std::numeric_limits<double>::infinity();
    }
    case Kind::pendulum_swingup:
      throw Error(Errc::invalid_argument, "the clipped pendulum controller has no density");
  }
  return -std::numeric_limits<double>::infinity();
}

std::string Policy::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::gaussian_linear: os << "gaussian_linear:" << gain_ << "," << bias_ << "," << sigma_; break;
    case Kind::constant:
      os << "constant:";
      for (std::size_t k = 0; k < constant_.size(); ++k) os << (k ? "," : "") << constant_[k];
      break;
    case Kind::discrete_table: os << "discrete_table(" << table_.size() << " states)"; break;
    case Kind::pendulum_swingup: os << "pendulum_swingup:" << sigma_; break;
  }
  return os.str();
}

std::vector<double> sample_action(const Policy& policy, std::span<const double> s, Rng& rng) {
  switch (policy.kind()) {
    case Policy::Kind::gaussian_linear: {
      auto a = policy.mean_action(s);
      if (policy.sigma() > 0.0) {
        std::normal_distribution<double> noise(0.0, policy.sigma());
        for (double& v : a) v += noise(rng);
      }
      return a;
    }
    case Policy::Kind::constant: return policy.constant_action();
    case Policy::Kind::pendulum_swingup: {
      double u = pendulum::controller_torque(s);
      if (policy.sigma() > 0.0) {
        std::normal_distribution<double> noise(0.0, policy.sigma());
        u += noise(rng);
      }
      return {std::clamp(u, -pendulum::kMaxTorque, pendulum::kMaxTorque)};
    }
    case Policy::Kind::discrete_table: {
      const auto& e = policy.entry(s);
      std::discrete_distribution<std::size_t> pick(e.probs.begin(), e.probs.end());
      return e.actions[pick(rng)];
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// Environments

double synthetic::f(double x) { return std::sqrt(x * x + x * std::sin(x) + 1.0); }

double pendulum::wrap_angle(double theta) {
  constexpr double pi = std::numbers::pi;
  double w = std::fmod(theta + pi, 2.0 * pi);
  if (w < 0.0) w += 2.0 * pi;
  return w - pi;
}

double pendulum::controller_torque(std::span<const double> s) {
  if (s.size() != 3) throw Error(Errc::dimension_mismatch, "pendulum state is (cos, sin, th_dot)");
  const double c = s[0], sn = s[1], thdot = s[2];
  const double theta = std::atan2(sn, c);
  constexpr double inertia = kMass * kLength * kLength / 3.0;
  constexpr double half_mgl = kMass * kGravity * kLength / 2.0;
  const double energy = 0.5 * inertia * thdot * thdot + half_mgl * (c - 1.0);

  // dE/dt = th_dot * u, so u ~ -E * sign(th_dot) pumps energy toward the
  // upright level E = 0; tanh keeps the law continuous in the state.
  const double pump = -3.0 * energy * std::tanh(4.0 * thdot);
  const double balance = -8.0 * theta - 2.0 * thdot;

  // Smoothstep hand-over from pumping to balancing near the top.
  double w = std::clamp((c - 0.80) / (0.95 - 0.80), 0.0, 1.0);
  w = w * w * (3.0 - 2.0 * w);
  return std::clamp(w * balance + (1.0 - w) * pump, -kMaxTorque, kMaxTorque);
}

Environment Environment::synthetic(double gamma, double target_gain, double target_bias) {
  check_gamma(gamma);
  Environment e;
  e.kind_ = Kind::synthetic_linear;
  e.gamma_ = gamma;
  e.target_gain_ = target_gain;
  e.target_bias_ = target_bias;
  return e;
}

Environment Environment::pendulum() {
  Environment e;
  e.kind_ = Kind::pendulum;
  return e;
}

std::string Environment::name() const { return kind_ == Kind::pendulum ? "pendulum" : "synthetic"; }

std::optional<Environment> environment_by_name(const std::string& name, double gamma) {
  if (name == "synthetic") return Environment::synthetic(gamma);
  if (name == "pendulum") return Environment::pendulum();
  return std::nullopt;
}

std::vector<double> Environment::sample_initial_state(Rng& rng) const {
  if (kind_ == Kind::pendulum) {
    std::uniform_real_distribution<double> th(-std::numbers::pi, std::numbers::pi);
    std::uniform_real_distribution<double> thdot(-1.0, 1.0);
    double theta = th(rng);
    double w = thdot(rng);
    return {std::cos(theta), std::sin(theta), w};
  }
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  return {u(rng)};
}

Policy Environment::default_target() const {
  if (kind_ == Kind::pendulum) return Policy::pendulum_swingup(0.0);
  return Policy::gaussian_linear(target_gain_, target_bias_, std::exp(-5.0));
}

double Environment::default_behavior_sigma() const { return kind_ == Kind::pendulum ? 0.4 : 0.1; }

Policy Environment::default_behavior(double behavior_sigma) const {
  if (kind_ == Kind::pendulum) return Policy::pendulum_swingup(behavior_sigma);
  return Policy::gaussian_linear(target_gain_, target_bias_, behavior_sigma);
}

double Environment::synthetic_q(double s, double a) const {
  if (kind_ != Kind::synthetic_linear) throw Error(Errc::invalid_argument, "known Q exists only for synthetic");
  return synthetic::f(s) + synthetic::f(a - synthetic::kHalfPi);
}

StepResult step(const Environment& env, std::span<const double> s, std::span<const double> a) {
  if (s.size() != env.state_dim() || a.size() != env.action_dim())
    throw Error(Errc::dimension_mismatch, "state/action dimension does not match " + env.name());
  if (env.kind() == Environment::Kind::synthetic_linear) {
    const double s0 = s[0], a0 = a[0];
    const double s1 = 0.8 * s0 - 0.4 * a0 - 0.1;
    // Reverse Bellman error of the known Q, using the target's mean action.
    const double a1 = env.target_gain() * s1 + env.target_bias();
    const double r = env.synthetic_q(s0, a0) - env.reward_gamma() * env.synthetic_q(s1, a1);
    return {{s1}, r};
  }
  using namespace pendulum;
  const double theta = std::atan2(s[1], s[0]);
  const double thdot = s[2];
  const double u = std::clamp(a[0], -kMaxTorque, kMaxTorque);
  const double th_n = wrap_angle(theta);
  const double cost = th_n * th_n + 0.1 * thdot * thdot + 0.001 * u * u;
  double new_thdot = thdot + (3.0 * kGravity / (2.0 * kLength) * std::sin(theta) + 3.0 / (kMass * kLength * kLength) * u) * kDt;
  new_thdot = std::clamp(new_thdot, -kMaxSpeed, kMaxSpeed);
  const double new_theta = theta + new_thdot * kDt;
  return {{std::cos(new_theta), std::sin(new_theta), new_thdot}, -cost};
}

// ---------------------------------------------------------------------------
// Datasets

void TransitionDataset::add(Row row) {
  if (row.s.size() != state_dim_ || row.s_next.size() != state_dim_ || row.a.size() != action_dim_)
    throw Error(Errc::dimension_mismatch, "row dimensions differ from dataset");
  if (state_dim_ + action_dim_ == 0) throw Error(Errc::invalid_argument, "dataset has zero dimension");
  check_finite(row.s, "state");
  check_finite(row.a, "action");
  check_finite(row.s_next, "next state");
  if (!std::isfinite(row.r)) throw Error(Errc::invalid_argument, "reward must be finite");
  rows_.push_back(std::move(row));
}

Point TransitionDataset::point(std::size_t i) const {
  const auto& r = rows_.at(i);
  return Point::join(r.s, r.a);
}

std::vector<Point> TransitionDataset::points() const {
  std::vector<Point> out;
  out.reserve(rows_.size());
  for (std::size_t i = 0; i < rows_.size(); ++i) out.push_back(point(i));
  return out;
}

TransitionDataset TransitionDataset::prefix(std::size_t count) const {
  TransitionDataset out(state_dim_, action_dim_);
  count = std::min(count, rows_.size());
  out.rows_.assign(rows_.begin(), rows_.begin() + static_cast<long>(count));
  return out;
}

TransitionDataset TransitionDataset::negated() const {
  TransitionDataset out = *this;
  for (auto& r : out.rows_) r.r = -r.r;
  return out;
}

TransitionDataset collect(const Environment& env, const Policy& behavior, std::size_t n_trajectories,
                          std::size_t horizon, std::uint64_t seed) {
  if (n_trajectories == 0 || horizon == 0) throw Error(Errc::invalid_argument, "need at least one step");
  TransitionDataset data(env.state_dim(), env.action_dim());
  for (std::size_t e = 0; e < n_trajectories; ++e) {
    Rng rng(derive_seed(seed, streams::episode, e));
    auto s = env.sample_initial_state(rng);
    for (std::size_t t = 0; t < horizon; ++t) {
      auto a = sample_action(behavior, s, rng);
      auto res = step(env, s, a);
      data.add({s, a, res.reward, res.s_next, static_cast<std::int64_t>(e), static_cast<std::int64_t>(t)});
      s = std::move(res.s_next);
    }
  }
  return data;
}

GroundTruth ground_truth_return(const Environment& env, const Policy& target, double gamma,
                                std::size_t n_rollouts, std::size_t horizon, std::uint64_t seed) {
  check_gamma(gamma);
  if (n_rollouts == 0 || horizon == 0) throw Error(Errc::invalid_argument, "need rollouts and horizon");
  double mean = 0.0, m2 = 0.0, rmax = 0.0;
  for (std::size_t j = 0; j < n_rollouts; ++j) {
    Rng rng(derive_seed(seed, streams::rollout, j));
    auto s = env.sample_initial_state(rng);
    double ret = 0.0, disc = 1.0;
    for (std::size_t t = 0; t < horizon; ++t) {
      auto a = sample_action(target, s, rng);
      auto res = step(env, s, a);
      ret += disc * res.reward;
      rmax = std::max(rmax, std::abs(res.reward));
      disc *= gamma;
      s = std::move(res.s_next);
    }
    double delta = ret - mean;
    mean += delta / static_cast<double>(j + 1);
    m2 += delta * (ret - mean);
  }
  double var = n_rollouts > 1 ? m2 / static_cast<double>(n_rollouts - 1) : 0.0;
  double trunc = std::pow(gamma, static_cast<double>(horizon)) * rmax / (1.0 - gamma);
  return {mean, std::sqrt(var / static_cast<double>(n_rollouts)), trunc, n_rollouts, horizon};
}

std::vector<Point> sample_init_points(const Environment& env, const Policy& target, std::size_t count,
                                      std::uint64_t seed) {
  std::vector<Point> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(derive_seed(seed, streams::init_points, i));
    auto s = env.sample_initial_state(rng);
    auto a = sample_action(target, s, rng);
    out.push_back(Point::join(s, a));
  }
  return out;
}

}  // namespace lipvi
