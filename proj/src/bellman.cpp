#include "lipvi/bellman.hpp"

#include <algorithm>

#include "lipvi/random.hpp"

namespace lipvi {

Point FrozenBellman::anchor(std::size_t i) const {
  if (i >= size()) throw Error(Errc::index_out_of_range, "row index out of range");
  auto c = anchors_.row(i);
  return Point(std::vector<double>(c.begin(), c.end()), state_dim_, action_dim_);
}

std::vector<Point> FrozenBellman::support(std::size_t i) const {
  if (i >= size()) throw Error(Errc::index_out_of_range, "row index out of range");
  std::vector<Point> out;
  for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) {
    auto c = next_.row(k);
    out.emplace_back(std::vector<double>(c.begin(), c.end()), state_dim_, action_dim_);
  }
  return out;
}

FrozenBellman FrozenBellman::negated() const {
  FrozenBellman out = *this;
  for (double& r : out.rewards_) r = -r;
  return out;
}

FrozenBellman FrozenBellman::from_rows(std::vector<Point> anchors, std::vector<double> rewards,
                                       std::vector<std::vector<std::pair<Point, double>>> supports, double gamma) {
  check_gamma(gamma);
  if (anchors.empty()) throw Error(Errc::empty_input, "no rows");
  if (anchors.size() != rewards.size() || anchors.size() != supports.size())
    throw Error(Errc::length_mismatch, "anchors, rewards and supports must have equal length");
  FrozenBellman fb;
  fb.gamma_ = gamma;
  fb.state_dim_ = anchors.front().state_dim();
  fb.action_dim_ = anchors.front().action_dim();
  fb.anchors_.dim = anchors.front().dim();
  fb.next_.dim = fb.anchors_.dim;
  std::size_t max_support = 1;
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    if (anchors[i].state_dim() != fb.state_dim_ || anchors[i].action_dim() != fb.action_dim_)
      throw Error(Errc::dimension_mismatch, "anchor dimensions differ");
    if (supports[i].empty()) throw Error(Errc::empty_input, "row without next points");
    fb.anchors_.push(anchors[i].coords());
    double total = 0.0;
    for (const auto& [p, w] : supports[i]) {
      if (p.state_dim() != fb.state_dim_ || p.action_dim() != fb.action_dim_)
        throw Error(Errc::dimension_mismatch, "next point dimensions differ");
      if (!(w > 0.0)) throw Error(Errc::invalid_argument, "support weights must be positive");
      fb.next_.push(p.coords());
      fb.weights_.push_back(w);
      total += w;
    }
    if (std::abs(total - 1.0) > 1e-9) throw Error(Errc::invalid_argument, "support weights must sum to 1");
    fb.offsets_.push_back(fb.weights_.size());
    max_support = std::max(max_support, supports[i].size());
  }
  fb.rewards_ = std::move(rewards);
  fb.action_samples_ = max_support;
  fb.stochastic_ = max_support > 1;
  return fb;
}

FrozenBellman freeze(const TransitionDataset& dataset, const Policy& target, std::size_t action_samples,
                     double gamma, std::uint64_t seed) {
  check_gamma(gamma);
  if (action_samples == 0) throw Error(Errc::invalid_argument, "need at least one action sample");
  if (dataset.empty()) throw Error(Errc::empty_input, "empty dataset");
  if (target.action_dim() != dataset.action_dim())
    throw Error(Errc::dimension_mismatch, "policy action dimension differs from dataset");

  FrozenBellman fb;
  fb.gamma_ = gamma;
  fb.action_samples_ = action_samples;
  fb.seed_ = seed;
  fb.stochastic_ = !target.deterministic();
  fb.state_dim_ = dataset.state_dim();
  fb.action_dim_ = dataset.action_dim();
  fb.anchors_.dim = fb.state_dim_ + fb.action_dim_;
  fb.next_.dim = fb.anchors_.dim;
  fb.rewards_.reserve(dataset.size());

  std::vector<double> buf(fb.anchors_.dim);
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& row = dataset[i];
    std::copy(row.s.begin(), row.s.end(), buf.begin());
    std::copy(row.a.begin(), row.a.end(), buf.begin() + static_cast<long>(fb.state_dim_));
    fb.anchors_.push(buf);
    fb.rewards_.push_back(row.r);
    std::copy(row.s_next.begin(), row.s_next.end(), buf.begin());

    if (target.kind() == Policy::Kind::discrete_table) {
      const auto& e = target.entry(row.s_next);
      for (std::size_t k = 0; k < e.actions.size(); ++k) {
        if (e.probs[k] <= 0.0) continue;
        std::copy(e.actions[k].begin(), e.actions[k].end(), buf.begin() + static_cast<long>(fb.state_dim_));
        fb.next_.push(buf);
        fb.weights_.push_back(e.probs[k]);
      }
    } else if (target.deterministic()) {
      auto a = target.mean_action(row.s_next);
      std::copy(a.begin(), a.end(), buf.begin() + static_cast<long>(fb.state_dim_));
      fb.next_.push(buf);
      fb.weights_.push_back(1.0);
    } else {
      Rng rng(derive_seed(seed, streams::freeze, i));
      const double w = 1.0 / static_cast<double>(action_samples);
      for (std::size_t k = 0; k < action_samples; ++k) {
        auto a = sample_action(target, row.s_next, rng);
        std::copy(a.begin(), a.end(), buf.begin() + static_cast<long>(fb.state_dim_));
        fb.next_.push(buf);
        fb.weights_.push_back(w);
      }
    }
    fb.offsets_.push_back(fb.weights_.size());
  }
  return fb;
}

double apply_values(const FrozenBellman& fb, std::span<const double> next_values, std::size_t i) {
  if (i >= fb.size()) throw Error(Errc::index_out_of_range, "row index out of range");
  if (next_values.size() != fb.total_support()) throw Error(Errc::length_mismatch, "one value per support point");
  double acc = 0.0;
  for (std::size_t k = fb.support_begin(i); k < fb.support_end(i); ++k) acc += fb.weights()[k] * next_values[k];
  return fb.reward(i) + fb.gamma() * acc;
}

}  // namespace lipvi
