#include "lipvi/lvi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "lipvi/anchor_tree.hpp"
#include "lipvi/error.hpp"
#include "lipvi/parallel.hpp"
#include "lipvi/random.hpp"

namespace lipvi {

void LviConfig::validate() const {
  check_gamma(gamma);
  if (!(eta > 0.0) || !std::isfinite(eta)) throw Error(Errc::invalid_argument, "eta must be positive");
  if (tol && !(*tol > 0.0)) throw Error(Errc::invalid_argument, "tol must be positive");
  if (action_samples == 0) throw Error(Errc::invalid_argument, "action_samples must be at least 1");
  if (init_points == 0) throw Error(Errc::invalid_argument, "init_points must be at least 1");
  if (!(kappa > 1.0) || !std::isfinite(kappa)) throw Error(Errc::invalid_argument, "kappa must exceed 1");
}

std::string to_string(DiagnosisOutcome d) {
  switch (d) {
    case DiagnosisOutcome::passed: return "passed";
    case DiagnosisOutcome::escalated: return "escalated";
    case DiagnosisOutcome::exhausted: return "exhausted";
  }
  return "unknown";
}

namespace {

// Anchors and next points mapped into the metric's embedding space, plus the
// mean distance from each anchor to its own next points.
struct Embedded {
  PointMatrix anchors;
  PointMatrix next;
  std::vector<double> mean_dist;
  std::size_t fallbacks = 0;
};

Embedded embed(const FrozenBellman& fb, const Metric& metric) {
  Embedded e;
  e.fallbacks = metric.embed_all(fb.anchors(), e.anchors);
  e.fallbacks += metric.embed_all(fb.next_points(), e.next);
  e.mean_dist.resize(fb.size());
  const auto w = fb.weights();
  for (std::size_t i = 0; i < fb.size(); ++i) {
    double acc = 0.0;
    auto xi = e.anchors.row(i);
    for (std::size_t k = fb.support_begin(i); k < fb.support_end(i); ++k) acc += w[k] * euclid(xi, e.next.row(k));
    e.mean_dist[i] = acc;
  }
  return e;
}

std::vector<double> init_labels(const FrozenBellman& fb, const Embedded& e, double eta, Direction dir) {
  const double g = fb.gamma();
  std::vector<double> q(fb.size());
  for (std::size_t i = 0; i < fb.size(); ++i) {
    double slack = g * eta * e.mean_dist[i];
    q[i] = (dir == Direction::upper ? fb.reward(i) + slack : fb.reward(i) - slack) / (1.0 - g);
  }
  return q;
}

double backup(const FrozenBellman& fb, const Embedded& e, const EnvelopeKernel& kernel, std::size_t i) {
  const auto w = fb.weights();
  double acc = 0.0;
  std::size_t hint = AnchorTree::npos;
  for (std::size_t k = fb.support_begin(i); k < fb.support_end(i); ++k)
    acc += w[k] * kernel.eval(e.next.row(k), &hint, hint);
  return fb.reward(i) + fb.gamma() * acc;
}

std::vector<double> backup_rows(const FrozenBellman& fb, const Embedded& e, const EnvelopeKernel& kernel,
                                std::span<const std::size_t> rows) {
  std::vector<double> out(rows.size());
  parallel_blocks(
      rows.size(),
      [&](std::size_t b, std::size_t end) {
        for (std::size_t r = b; r < end; ++r) out[r] = backup(fb, e, kernel, rows[r]);
      },
      16);
  return out;
}

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return rows;
}

void check_labels(std::span<const double> q, const FrozenBellman& fb) {
  if (q.size() != fb.size()) throw Error(Errc::length_mismatch, "one label per row");
  for (double v : q)
    if (!std::isfinite(v)) throw Error(Errc::invalid_argument, "labels must be finite");
}

void check_eta(double eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw Error(Errc::invalid_argument, "eta must be positive");
}

EnvelopeKernel subset_kernel(const Embedded& e, std::span<const double> q, double eta, Direction dir,
                             std::span<const std::size_t> subset) {
  PointMatrix anchors;
  anchors.dim = e.anchors.dim;
  anchors.data.reserve(subset.size() * anchors.dim);
  std::vector<double> labels;
  labels.reserve(subset.size());
  for (std::size_t i : subset) {
    anchors.push(e.anchors.row(i));
    labels.push_back(q[i]);
  }
  EnvelopeKernel kernel(std::move(anchors), eta, dir);
  kernel.set_labels(labels);
  return kernel;
}

void check_subset(std::span<const std::size_t> subset, std::size_t n) {
  if (subset.empty()) throw Error(Errc::empty_subset, "subset must be non-empty");
  for (std::size_t i : subset)
    if (i >= n) throw Error(Errc::index_out_of_range, "subset index out of range");
}

inline double tighten(double old, double candidate, Direction dir) {
  return dir == Direction::upper ? std::min(old, candidate) : std::max(old, candidate);
}

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Radius of the probe set around the anchors. Probes cover the bounding box
// of anchors and init points plus every point the envelopes are read at.
double run_covering_radius(const FrozenBellman& fb, const Embedded& e, std::span<const Point> init_points,
                           const PointMatrix& init_embedded, const Metric& metric, std::uint64_t seed) {
  std::vector<Point> region;
  region.reserve(fb.size() + init_points.size());
  for (std::size_t i = 0; i < fb.size(); ++i) region.push_back(fb.anchor(i));
  region.insert(region.end(), init_points.begin(), init_points.end());
  auto grid = default_probes(region, seed);
  PointMatrix grid_embedded;
  metric.embed_all(to_matrix(grid), grid_embedded);

  AnchorTree tree(e.anchors.data, e.anchors.dim);
  tree.set_offsets(std::vector<double>(fb.size(), 0.0));
  double radius = 0.0;
  for (const PointMatrix* m : std::initializer_list<const PointMatrix*>{&grid_embedded, &init_embedded, &e.next})
    for (std::size_t i = 0; i < m->rows(); ++i) radius = std::max(radius, tree.min_cone(m->row(i), 1.0).value);
  return radius;
}

}  // namespace

std::vector<double> init_upper(const FrozenBellman& fb, double eta, const Metric& metric) {
  check_eta(eta);
  return init_labels(fb, embed(fb, metric), eta, Direction::upper);
}

std::vector<double> init_lower(const FrozenBellman& fb, double eta, const Metric& metric) {
  check_eta(eta);
  return init_labels(fb, embed(fb, metric), eta, Direction::lower);
}

std::vector<double> iterate_full(std::span<const double> q, const FrozenBellman& fb, double eta,
                                 const Metric& metric, Direction direction) {
  check_eta(eta);
  check_labels(q, fb);
  Embedded e = embed(fb, metric);
  EnvelopeKernel kernel(e.anchors, eta, direction);
  kernel.set_labels(q);
  return backup_rows(fb, e, kernel, all_rows(fb.size()));
}

std::vector<double> iterate_subsampled(std::span<const double> q, const FrozenBellman& fb, double eta,
                                       const Metric& metric, Direction direction,
                                       std::span<const std::size_t> subset) {
  check_eta(eta);
  check_labels(q, fb);
  check_subset(subset, fb.size());
  Embedded e = embed(fb, metric);
  EnvelopeKernel kernel = subset_kernel(e, q, eta, direction, subset);
  auto b = backup_rows(fb, e, kernel, subset);
  std::vector<double> out(q.begin(), q.end());
  for (std::size_t r = 0; r < subset.size(); ++r) out[subset[r]] = tighten(q[subset[r]], b[r], direction);
  return out;
}

Diagnosis diagnose(std::span<const double> upper_values, std::span<const double> lower_values) {
  return crossing_indices(upper_values, lower_values).empty() ? Diagnosis::pass : Diagnosis::reject;
}

AnchorValues anchor_envelope_values(const FrozenBellman& fb, std::span<const double> upper_q,
                                    std::span<const double> lower_q, double eta, const Metric& metric) {
  check_eta(eta);
  check_labels(upper_q, fb);
  check_labels(lower_q, fb);
  PointMatrix anchors;
  metric.embed_all(fb.anchors(), anchors);
  EnvelopeKernel ku(anchors, eta, Direction::upper);
  EnvelopeKernel kl(anchors, eta, Direction::lower);
  ku.set_labels(upper_q);
  kl.set_labels(lower_q);
  AnchorValues out{std::vector<double>(fb.size()), std::vector<double>(fb.size())};
  ku.eval_rows(anchors, out.upper);
  kl.eval_rows(anchors, out.lower);
  return out;
}

std::vector<std::size_t> draw_subset(std::size_t n, std::size_t count, std::uint64_t seed, std::uint64_t iteration) {
  if (count == 0) throw Error(Errc::empty_subset, "subset size must be positive");
  count = std::min(count, n);
  std::vector<std::size_t> idx = all_rows(n);
  Rng rng(derive_seed(seed, streams::subsample, iteration));
  for (std::size_t k = 0; k < count; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, n - 1);
    std::swap(idx[k], idx[pick(rng)]);
  }
  idx.resize(count);
  std::sort(idx.begin(), idx.end());
  return idx;
}

namespace {

struct Attempt {
  std::vector<double> upper_q;
  std::vector<double> lower_q;
  std::vector<TraceEntry> trace;
  std::size_t iterations = 0;
  std::size_t converged_upper = 0;
  std::size_t converged_lower = 0;
  bool rejected = false;
  std::vector<std::size_t> crossings;
};

Attempt run_attempt(const FrozenBellman& fb, const Embedded& e, const PointMatrix& init_embedded,
                    const LviConfig& cfg, double eta, double tol, bool subsampled) {
  const std::size_t n = fb.size();
  Attempt a;
  a.upper_q = init_labels(fb, e, eta, Direction::upper);
  a.lower_q = init_labels(fb, e, eta, Direction::lower);

  EnvelopeKernel ku(e.anchors, eta, Direction::upper);
  EnvelopeKernel kl(e.anchors, eta, Direction::lower);
  std::vector<double> at_init(init_embedded.rows());
  std::vector<double> env_u(n), env_l(n);

  // Labels into the full kernels, then trace entry and diagnosis at step t.
  auto observe = [&](std::size_t t, double dq) {
    ku.set_labels(a.upper_q);
    kl.set_labels(a.lower_q);
    ku.eval_rows(init_embedded, at_init);
    double ru = mean_of(at_init);
    kl.eval_rows(init_embedded, at_init);
    double rl = mean_of(at_init);
    a.trace.push_back({t, ru, rl, dq});
    ku.eval_rows(e.anchors, env_u);
    kl.eval_rows(e.anchors, env_l);
    a.crossings = crossing_indices(env_u, env_l);
    return a.crossings.empty();
  };

  if (!observe(0, std::numeric_limits<double>::quiet_NaN())) {
    a.rejected = true;
    return a;
  }

  const auto everything = all_rows(n);
  bool done_u = false, done_l = false;
  for (std::size_t t = 1; t <= cfg.max_iters; ++t) {
    std::vector<std::size_t> subset = subsampled ? draw_subset(n, cfg.subsample, cfg.seed, t) : everything;
    std::vector<double> bu, bl;
    if (subsampled) {
      bu = backup_rows(fb, e, subset_kernel(e, a.upper_q, eta, Direction::upper, subset), subset);
      bl = backup_rows(fb, e, subset_kernel(e, a.lower_q, eta, Direction::lower, subset), subset);
    } else {
      bu = backup_rows(fb, e, ku, subset);
      bl = backup_rows(fb, e, kl, subset);
    }

    if (t == 1) {
      for (std::size_t r = 0; r < subset.size(); ++r) {
        std::size_t i = subset[r];
        if (bu[r] > a.upper_q[i] + 1e-9 * (1.0 + std::abs(a.upper_q[i])) ||
            bl[r] < a.lower_q[i] - 1e-9 * (1.0 + std::abs(a.lower_q[i])))
          throw std::logic_error("initial labels are not monotone for the first update");
      }
    }

    double du = 0.0, dl = 0.0;
    for (std::size_t r = 0; r < subset.size(); ++r) {
      std::size_t i = subset[r];
      double nu = tighten(a.upper_q[i], bu[r], Direction::upper);
      double nl = tighten(a.lower_q[i], bl[r], Direction::lower);
      du = std::max(du, a.upper_q[i] - nu);
      dl = std::max(dl, nl - a.lower_q[i]);
      a.upper_q[i] = nu;
      a.lower_q[i] = nl;
    }
    a.iterations = t;
    if (!done_u && du <= tol) {
      done_u = true;
      a.converged_upper = t;
    }
    if (!done_l && dl <= tol) {
      done_l = true;
      a.converged_lower = t;
    }

    if (!observe(t, std::max(du, dl))) {
      a.rejected = true;
      return a;
    }
    if (du <= tol && dl <= tol) break;
  }
  if (!done_u) a.converged_upper = a.iterations;
  if (!done_l) a.converged_lower = a.iterations;
  return a;
}

}  // namespace

BoundsReport run(const FrozenBellman& fb, const LviConfig& cfg, std::span<const Point> init_points,
                 const Metric& metric) {
  cfg.validate();
  if (fb.size() == 0) throw Error(Errc::empty_input, "no rows");
  if (init_points.empty()) throw Error(Errc::empty_input, "no initial points");
  if (std::abs(fb.gamma() - cfg.gamma) > 0.0) throw Error(Errc::invalid_gamma, "config gamma differs from operator");
  for (const auto& p : init_points)
    if (p.state_dim() != fb.state_dim() || p.action_dim() != fb.action_dim())
      throw Error(Errc::dimension_mismatch, "initial point dimensions differ from the data");

  Embedded e = embed(fb, metric);
  PointMatrix init_embedded;
  e.fallbacks += metric.embed_all(to_matrix(init_points), init_embedded);

  double max_r = 0.0;
  for (double r : fb.rewards()) max_r = std::max(max_r, std::abs(r));
  const double tol = cfg.tol.value_or(1e-6 * (1.0 + max_r));
  const bool subsampled = cfg.subsample > 0 && cfg.subsample < fb.size();

  BoundsReport rep;
  rep.config = cfg;
  rep.tol = tol;
  rep.rows = fb.size();
  rep.subsample_used = subsampled ? cfg.subsample : fb.size();
  rep.action_samples = fb.action_samples();
  rep.stochastic_target = fb.stochastic_policy();
  rep.feature_fallbacks = e.fallbacks;
  rep.eta_initial = cfg.eta;

  Attempt last;
  std::vector<std::size_t> rejected_crossings;
  double eta = cfg.eta;
  bool passed = false;
  for (std::size_t k = 0; k <= cfg.max_escalations; ++k) {
    eta = cfg.eta * std::pow(cfg.kappa, static_cast<double>(k));
    last = run_attempt(fb, e, init_embedded, cfg, eta, tol, subsampled);
    rep.escalations = k;
    if (!last.rejected) {
      passed = true;
      break;
    }
    rejected_crossings = last.crossings;
  }

  rep.eta_used = eta;
  rep.diagnosis = !passed ? DiagnosisOutcome::exhausted
                          : (rep.escalations == 0 ? DiagnosisOutcome::passed : DiagnosisOutcome::escalated);
  rep.crossings = rejected_crossings;
  rep.trace = last.trace;
  rep.upper = last.trace.back().r_upper;
  rep.lower = last.trace.back().r_lower;
  rep.iterations = last.iterations;
  rep.iterations_upper = last.converged_upper;
  rep.iterations_lower = last.converged_lower;
  rep.upper_q = std::move(last.upper_q);
  rep.lower_q = std::move(last.lower_q);
  rep.covering_radius = run_covering_radius(fb, e, init_points, init_embedded, metric, cfg.seed);
  rep.gap_bound = 2.0 * eta * rep.covering_radius / (1.0 - fb.gamma());
  return rep;
}

BoundsReport run(const TransitionDataset& dataset, const Policy& target, const LviConfig& cfg,
                 std::span<const Point> init_points, const Metric& metric) {
  cfg.validate();
  FrozenBellman fb = freeze(dataset, target, cfg.action_samples, cfg.gamma, cfg.seed);
  return run(fb, cfg, init_points, metric);
}

}  // namespace lipvi
