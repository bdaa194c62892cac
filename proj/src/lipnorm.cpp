#include "lipvi/lipnorm.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>

#include "lipvi/error.hpp"
#include "lipvi/parallel.hpp"
#include "lipvi/random.hpp"

namespace lipvi {

namespace {

std::vector<std::size_t> capped_rows(std::size_t n, std::size_t cap, std::uint64_t seed, bool& capped) {
  std::vector<std::size_t> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = i;
  capped = cap > 0 && n > cap;
  if (!capped) return rows;
  Rng rng(derive_seed(seed, streams::row_cap, 0));
  for (std::size_t k = 0; k < cap; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, n - 1);
    std::swap(rows[k], rows[pick(rng)]);
  }
  rows.resize(cap);
  std::sort(rows.begin(), rows.end());
  return rows;
}

// max over pairs of num(i,j) / den(i,j) where den is a distance between
// embedded points. Coincident denominators with a non-zero numerator are a
// conflict.
template <class Num>
double pair_scan(const PointMatrix& den_points, Num&& num, const char* what) {
  const std::size_t m = den_points.rows();
  std::vector<double> block_max;
  std::mutex mu;
  std::atomic<bool> conflict{false};
  parallel_blocks(
      m,
      [&](std::size_t b, std::size_t e) {
        double best = 0.0;
        for (std::size_t i = b; i < e && !conflict.load(std::memory_order_relaxed); ++i) {
          for (std::size_t j = i + 1; j < m; ++j) {
            double d = euclid(den_points.row(i), den_points.row(j));
            double top = num(i, j);
            if (d <= kZeroDistance) {
              if (top > 1e-9) conflict = true;
              continue;
            }
            best = std::max(best, top / d);
          }
        }
        std::lock_guard lock(mu);
        block_max.push_back(best);
      },
      64);
  if (conflict) throw Error(Errc::duplicate_conflict, std::string("coincident points with different ") + what);
  double out = 0.0;
  for (double v : block_max) out = std::max(out, v);
  return out;
}

}  // namespace

LipschitzEstimate estimate_reward_lipschitz(const TransitionDataset& dataset, const Metric& metric,
                                            std::size_t row_cap, std::uint64_t seed) {
  if (dataset.size() < 2) throw Error(Errc::too_few_rows, "need at least two rows");
  LipschitzEstimate est;
  auto rows = capped_rows(dataset.size(), row_cap, seed, est.capped);
  est.rows_used = rows.size();
  PointMatrix raw, x;
  std::vector<double> r;
  for (std::size_t i : rows) {
    raw.push(dataset.point(i).coords());
    r.push_back(dataset[i].r);
  }
  metric.embed_all(raw, x);
  est.value = pair_scan(x, [&](std::size_t i, std::size_t j) { return std::abs(r[i] - r[j]); }, "rewards");
  return est;
}

LipschitzEstimate estimate_transition_lipschitz(const TransitionDataset& dataset, const Metric& metric_x,
                                                const Metric& metric_s, std::size_t row_cap, std::uint64_t seed) {
  if (dataset.size() < 2) throw Error(Errc::too_few_rows, "need at least two rows");
  LipschitzEstimate est;
  auto rows = capped_rows(dataset.size(), row_cap, seed, est.capped);
  est.rows_used = rows.size();
  PointMatrix raw_x, raw_s, x, s;
  for (std::size_t i : rows) {
    raw_x.push(dataset.point(i).coords());
    raw_s.push(dataset[i].s_next);
  }
  metric_x.embed_all(raw_x, x);
  metric_s.embed_all(raw_s, s);
  est.value = pair_scan(x, [&](std::size_t i, std::size_t j) { return euclid(s.row(i), s.row(j)); }, "next states");
  return est;
}

double propagate(double eta_r, double eta_t, double gamma) {
  check_gamma(gamma);
  if (!(eta_r >= 0.0) || !(eta_t >= 0.0)) throw Error(Errc::invalid_argument, "norms must be non-negative");
  if (gamma * eta_t >= 1.0)
    throw Error(Errc::contraction_violated, "gamma * ||T||_Lip >= 1; pass eta explicitly");
  return eta_r / (1.0 - gamma * eta_t);
}

double propagate_checked(double eta_r, double eta_t, double gamma, const Metric& metric) {
  if (!metric.separable())
    throw Error(Errc::invalid_argument, "metric is not separable; pass eta explicitly");
  return propagate(eta_r, eta_t, gamma);
}

}  // namespace lipvi
