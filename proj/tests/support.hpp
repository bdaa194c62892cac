#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "lipvi/bellman.hpp"
#include "lipvi/metric.hpp"

namespace lipvi::test {

using Gen = std::mt19937_64;

inline double uniform(Gen& g, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(g); }

inline std::size_t pick(Gen& g, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(g);
}

inline Point random_point(Gen& g, std::size_t ds, std::size_t da, double box = 2.0) {
  std::vector<double> c(ds + da);
  for (auto& v : c) v = uniform(g, -box, box);
  return Point(std::move(c), ds, da);
}

inline std::vector<Point> random_points(Gen& g, std::size_t n, std::size_t ds, std::size_t da, double box = 2.0) {
  std::vector<Point> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(random_point(g, ds, da, box));
  return out;
}

inline std::vector<double> random_values(Gen& g, std::size_t n, double lo = -3.0, double hi = 3.0) {
  std::vector<double> out(n);
  for (auto& v : out) v = uniform(g, lo, hi);
  return out;
}

inline Metric random_metric(Gen& g, std::size_t dim) {
  if (pick(g, 0, 1) == 0) return Metric::euclidean();
  std::vector<double> w(dim);
  for (auto& v : w) v = uniform(g, 0.2, 4.0);
  return Metric::weighted(std::move(w));
}

/// sqrt(sum_k w_k (p_k - q_k)^2), written out independently of the library.
inline double reference_distance(const std::vector<double>& w, const Point& p, const Point& q) {
  double acc = 0.0;
  for (std::size_t k = 0; k < p.dim(); ++k) {
    double wk = w.empty() ? 1.0 : w[k];
    acc += wk * (p[k] - q[k]) * (p[k] - q[k]);
  }
  return std::sqrt(acc);
}

/// Brute-force envelope over explicit anchors.
inline double reference_envelope(const std::vector<Point>& anchors, const std::vector<double>& q, double eta,
                                 bool upper, const std::vector<double>& w, const Point& x) {
  double best = upper ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < anchors.size(); ++j) {
    double d = reference_distance(w, x, anchors[j]);
    best = upper ? std::min(best, q[j] + eta * d) : std::max(best, q[j] - eta * d);
  }
  return best;
}

/// Tiny frozen instance: n rows on random points, each with 1..3 next points
/// drawn either from the anchors themselves or fresh.
struct TinyInstance {
  FrozenBellman fb;
  std::vector<Point> init;
};

inline TinyInstance random_tiny_instance(Gen& g, std::size_t n, std::size_t dim, double gamma,
                                         std::size_t n_init = 2) {
  auto anchors = random_points(g, n, dim, 0, 1.5);
  auto rewards = random_values(g, n, -1.0, 1.0);
  std::vector<std::vector<std::pair<Point, double>>> supports(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t k = pick(g, 1, 2);
    for (std::size_t j = 0; j < k; ++j) {
      Point p = pick(g, 0, 2) == 0 ? random_point(g, dim, 0, 1.5) : anchors[pick(g, 0, n - 1)];
      supports[i].push_back({p, 1.0 / static_cast<double>(k)});
    }
  }
  std::vector<Point> init;
  for (std::size_t z = 0; z < n_init; ++z)
    init.push_back(pick(g, 0, 1) == 0 ? anchors[pick(g, 0, n - 1)] : random_point(g, dim, 0, 1.5));
  return {FrozenBellman::from_rows(anchors, rewards, std::move(supports), gamma), std::move(init)};
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("lipvi_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace lipvi::test
