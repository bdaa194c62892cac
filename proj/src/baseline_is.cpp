#include "lipvi/baseline_is.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "lipvi/error.hpp"

namespace lipvi {

std::vector<Trajectory> split_trajectories(const TransitionDataset& dataset) {
  std::vector<Trajectory> out;
  std::map<std::int64_t, std::size_t> slot;
  for (const auto& row : dataset.rows()) {
    if (row.episode < 0) {
      out.push_back({{row}});
      continue;
    }
    auto [it, fresh] = slot.try_emplace(row.episode, out.size());
    if (fresh) out.emplace_back();
    out[it->second].steps.push_back(row);
  }
  for (auto& traj : out)
    std::stable_sort(traj.steps.begin(), traj.steps.end(),
                     [](const auto& a, const auto& b) { return a.t < b.t; });
  return out;
}

IsEstimate is_estimate(std::span<const Trajectory> trajectories, const Policy& behavior, const Policy& target,
                       double gamma) {
  check_gamma(gamma);
  if (trajectories.empty()) throw Error(Errc::empty_input, "no trajectories");
  IsEstimate est;
  for (const auto& traj : trajectories) {
    if (traj.steps.empty()) throw Error(Errc::empty_input, "empty trajectory");
    double ret = 0.0, discount = 1.0, log_w = 0.0;
    for (const auto& step : traj.steps) {
      double lb = behavior.log_density(step.s, step.a);
      if (lb == -std::numeric_limits<double>::infinity())
        throw Error(Errc::zero_behavior_density, "behavior policy has zero density at a logged action");
      log_w += target.log_density(step.s, step.a) - lb;
      ret += discount * step.r;
      discount *= gamma;
    }
    double w = std::exp(log_w);
    est.weights.push_back(w);
    est.weighted_returns.push_back(w * ret);
  }
  const double m = static_cast<double>(trajectories.size());
  double sum = 0.0, wsum = 0.0, wmax = 0.0;
  for (std::size_t k = 0; k < est.weights.size(); ++k) {
    sum += est.weighted_returns[k];
    wsum += est.weights[k];
    wmax = std::max(wmax, est.weights[k]);
  }
  est.estimate = sum / m;
  double ss = 0.0;
  for (double v : est.weighted_returns) ss += (v - est.estimate) * (v - est.estimate);
  est.standard_error = trajectories.size() > 1 ? std::sqrt(ss / (m - 1.0) / m) : 0.0;
  est.effective_sample_size = wmax > 0.0 ? wsum / wmax : 0.0;
  return est;
}

double hoeffding_lower(std::span<const double> weighted_returns, double value_range, double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) throw Error(Errc::invalid_delta, "delta must lie in (0, 1]");
  if (weighted_returns.empty()) throw Error(Errc::empty_input, "no returns");
  if (!(value_range >= 0.0)) throw Error(Errc::invalid_argument, "range must be non-negative");
  double sum = 0.0;
  for (double v : weighted_returns) sum += v;
  const double m = static_cast<double>(weighted_returns.size());
  return sum / m - value_range * std::sqrt(std::log(1.0 / delta) / (2.0 * m));
}

}  // namespace lipvi
