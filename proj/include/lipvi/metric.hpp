#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace lipvi {

/// A state-action pair x = (s, a) stored as one coordinate vector.
class Point {
 public:
  Point() = default;
  /// Throws Errc::invalid_argument on size mismatch, zero total dimension or
  /// non-finite coordinates.
  Point(std::vector<double> coords, std::size_t state_dim, std::size_t action_dim);

  static Point join(std::span<const double> state, std::span<const double> action);

  std::span<const double> coords() const { return coords_; }
  std::span<const double> state() const { return std::span<const double>(coords_).first(state_dim_); }
  std::span<const double> action() const { return std::span<const double>(coords_).subspan(state_dim_); }
  std::size_t state_dim() const { return state_dim_; }
  std::size_t action_dim() const { return action_dim_; }
  std::size_t dim() const { return coords_.size(); }
  double operator[](std::size_t k) const { return coords_[k]; }

  friend bool operator==(const Point&, const Point&) = default;

 private:
  std::vector<double> coords_;
  std::size_t state_dim_ = 0;
  std::size_t action_dim_ = 0;
};

/// Row-major block of equally sized vectors; the layout every distance
/// kernel works on.
struct PointMatrix {
  std::vector<double> data;
  std::size_t dim = 0;

  std::size_t rows() const { return dim == 0 ? 0 : data.size() / dim; }
  std::span<const double> row(std::size_t i) const { return {data.data() + i * dim, dim}; }
  void push(std::span<const double> v);
};

/// Plain Euclidean distance with a fixed summation order. Every distance in
/// the library goes through this function so that different code paths
/// produce bit-identical values.
inline double euclid(const double* a, const double* b, std::size_t dim) {
  double acc = 0.0;
  for (std::size_t k = 0; k < dim; ++k) {
    double d = a[k] - b[k];
    acc += d * d;
  }
  return std::sqrt(acc);
}

inline double euclid(std::span<const double> a, std::span<const double> b) {
  return euclid(a.data(), b.data(), a.size());
}

/// Below this a distance counts as zero (duplicate detection).
inline constexpr double kZeroDistance = 1e-12;

class AnchorTree;

/// Precomputed feature vectors for the rows of a dataset. Lookups match a
/// query point to a row by its (s, a) coordinates; unseen points either fall
/// back to the nearest row's features or fail.
class FeatureTable {
 public:
  FeatureTable(PointMatrix row_points, PointMatrix features, bool allow_fallback = true);
  ~FeatureTable();
  FeatureTable(FeatureTable&&) noexcept;
  FeatureTable& operator=(FeatureTable&&) noexcept;

  std::size_t rows() const { return row_points_.rows(); }
  std::size_t feature_dim() const { return features_.dim; }
  std::size_t point_dim() const { return row_points_.dim; }
  bool allow_fallback() const { return allow_fallback_; }

  /// Feature row for a point; sets *used_fallback when no row matched exactly.
  std::span<const double> lookup(std::span<const double> x, bool* used_fallback) const;

 private:
  PointMatrix row_points_;
  PointMatrix features_;
  bool allow_fallback_;
  std::unique_ptr<AnchorTree> index_;
};

/// Distance on state-action space. Every kind is Euclidean in some embedding
/// (identity, per-axis scaling, or a feature lookup), which is what the
/// envelope kernels consume.
class Metric {
 public:
  enum class Kind { euclidean, weighted_euclidean, feature_table };

  static Metric euclidean();
  static Metric weighted(std::vector<double> weights);
  static Metric features(std::shared_ptr<const FeatureTable> table);

  Kind kind() const { return kind_; }
  /// d_x((s1,a), (s2,a)) == d_s(s1, s2) holds. True by construction for the
  /// Euclidean kinds; feature tables make no such promise.
  bool separable() const { return kind_ != Kind::feature_table; }
  const std::vector<double>& weights() const { return weights_; }
  const FeatureTable* table() const { return table_.get(); }

  /// Dimension of the embedding space for points of dimension `point_dim`.
  std::size_t embedded_dim(std::size_t point_dim) const;

  /// Maps coordinates into the embedding space. Throws dimension_mismatch or
  /// feature_lookup_miss.
  void embed(std::span<const double> x, std::span<double> out, bool* used_fallback = nullptr) const;
  std::vector<double> embed(const Point& p, bool* used_fallback = nullptr) const;

  /// Embeds every point; returns how many lookups needed the fallback rule.
  std::size_t embed_all(const PointMatrix& points, PointMatrix& out) const;

  /// Metric on the state block alone, used for transition Lipschitz
  /// estimates. Feature tables fall back to plain Euclidean on states.
  Metric state_metric(std::size_t state_dim) const;

  std::string describe() const;

 private:
  Kind kind_ = Kind::euclidean;
  std::vector<double> weights_;
  std::vector<double> sqrt_weights_;
  std::shared_ptr<const FeatureTable> table_;
};

/// d(p, q). Throws dimension_mismatch or feature_lookup_miss.
double distance(const Metric& metric, const Point& p, const Point& q);

/// max over probes of the distance to the nearest data point. A lower bound
/// on the covering radius of the continuous region the probes sample.
double covering_radius(std::span<const Point> data_points, std::span<const Point> probe_points,
                       const Metric& metric);

/// Default probe set: a uniform grid of ~`count` points over the bounding box
/// of `points` inflated by 5% per axis when at most two axes have extent,
/// otherwise `count` uniform random points in that box.
std::vector<Point> default_probes(std::span<const Point> points, std::uint64_t seed,
                                  std::size_t count = 10000);

PointMatrix to_matrix(std::span<const Point> points);

}  // namespace lipvi
