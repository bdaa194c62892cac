#include "lipvi/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "lipvi/anchor_tree.hpp"
#include "lipvi/error.hpp"
#include "lipvi/random.hpp"

namespace lipvi {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::feature_lookup_miss: return "FeatureLookupMiss";
    case Errc::empty_input: return "EmptyInput";
    case Errc::invalid_gamma: return "InvalidGamma";
    case Errc::index_out_of_range: return "IndexOutOfRange";
    case Errc::length_mismatch: return "LengthMismatch";
    case Errc::empty_subset: return "EmptySubset";
    case Errc::eta_exhausted: return "EtaExhausted";
    case Errc::duplicate_conflict: return "DuplicateConflict";
    case Errc::too_few_rows: return "TooFewRows";
    case Errc::contraction_violated: return "ContractionViolated";
    case Errc::instance_too_large: return "InstanceTooLarge";
    case Errc::infeasible: return "Infeasible";
    case Errc::unbounded: return "Unbounded";
    case Errc::zero_behavior_density: return "ZeroBehaviorDensity";
    case Errc::invalid_delta: return "InvalidDelta";
    case Errc::invalid_argument: return "InvalidArgument";
    case Errc::io_error: return "IoError";
    case Errc::parse_error: return "ParseError";
  }
  return "Unknown";
}

void check_gamma(double gamma) {
  if (!(gamma >= 0.0 && gamma < 1.0))
    throw Error(Errc::invalid_gamma, "gamma must lie in [0, 1), got " + std::to_string(gamma));
}

Point::Point(std::vector<double> coords, std::size_t state_dim, std::size_t action_dim)
    : coords_(std::move(coords)), state_dim_(state_dim), action_dim_(action_dim) {
  if (state_dim + action_dim == 0) throw Error(Errc::invalid_argument, "point needs at least one coordinate");
  if (coords_.size() != state_dim + action_dim)
    throw Error(Errc::dimension_mismatch, "point has " + std::to_string(coords_.size()) +
                                              " coordinates, expected " + std::to_string(state_dim + action_dim));
  for (double c : coords_)
    if (!std::isfinite(c)) throw Error(Errc::invalid_argument, "point coordinates must be finite");
}

Point Point::join(std::span<const double> state, std::span<const double> action) {
  std::vector<double> c(state.begin(), state.end());
  c.insert(c.end(), action.begin(), action.end());
  return Point(std::move(c), state.size(), action.size());
}

void PointMatrix::push(std::span<const double> v) {
  if (dim == 0) dim = v.size();
  if (v.size() != dim) throw Error(Errc::dimension_mismatch, "row dimension differs from matrix");
  data.insert(data.end(), v.begin(), v.end());
}

PointMatrix to_matrix(std::span<const Point> points) {
  PointMatrix m;
  if (points.empty()) return m;
  m.dim = points.front().dim();
  m.data.reserve(points.size() * m.dim);
  for (const auto& p : points) m.push(p.coords());
  return m;
}

// ---------------------------------------------------------------------------

FeatureTable::FeatureTable(PointMatrix row_points, PointMatrix features, bool allow_fallback)
    : row_points_(std::move(row_points)), features_(std::move(features)), allow_fallback_(allow_fallback) {
  if (row_points_.rows() == 0) throw Error(Errc::empty_input, "feature table has no rows");
  if (row_points_.rows() != features_.rows())
    throw Error(Errc::length_mismatch, "feature table rows differ from dataset rows");
  index_ = std::make_unique<AnchorTree>(row_points_.data, row_points_.dim);
}

FeatureTable::~FeatureTable() = default;
FeatureTable::FeatureTable(FeatureTable&&) noexcept = default;
FeatureTable& FeatureTable::operator=(FeatureTable&&) noexcept = default;

std::span<const double> FeatureTable::lookup(std::span<const double> x, bool* used_fallback) const {
  if (x.size() != row_points_.dim) throw Error(Errc::dimension_mismatch, "feature lookup dimension mismatch");
  auto hit = index_->min_cone(x, 1.0);
  bool exact = hit.value <= kZeroDistance;
  if (!exact && !allow_fallback_) throw Error(Errc::feature_lookup_miss, "point matches no dataset row");
  if (used_fallback) *used_fallback = !exact;
  return features_.row(hit.index);
}

// ---------------------------------------------------------------------------

Metric Metric::euclidean() { return Metric{}; }

Metric Metric::weighted(std::vector<double> weights) {
  if (weights.empty()) throw Error(Errc::invalid_argument, "weighted metric needs weights");
  Metric m;
  m.kind_ = Kind::weighted_euclidean;
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw Error(Errc::invalid_argument, "metric weights must be positive");
    m.sqrt_weights_.push_back(std::sqrt(w));
  }
  m.weights_ = std::move(weights);
  return m;
}

Metric Metric::features(std::shared_ptr<const FeatureTable> table) {
  if (!table) throw Error(Errc::invalid_argument, "null feature table");
  Metric m;
  m.kind_ = Kind::feature_table;
  m.table_ = std::move(table);
  return m;
}

std::size_t Metric::embedded_dim(std::size_t point_dim) const {
  switch (kind_) {
    case Kind::euclidean: return point_dim;
    case Kind::weighted_euclidean: return weights_.size();
    case Kind::feature_table: return table_->feature_dim();
  }
  return point_dim;
}

void Metric::embed(std::span<const double> x, std::span<double> out, bool* used_fallback) const {
  if (used_fallback) *used_fallback = false;
  switch (kind_) {
    case Kind::euclidean:
      if (out.size() != x.size()) throw Error(Errc::dimension_mismatch, "embedding size mismatch");
      std::copy(x.begin(), x.end(), out.begin());
      return;
    case Kind::weighted_euclidean:
      if (x.size() != weights_.size())
        throw Error(Errc::dimension_mismatch, "point dimension differs from metric weights");
      for (std::size_t k = 0; k < x.size(); ++k) out[k] = sqrt_weights_[k] * x[k];
      return;
    case Kind::feature_table: {
      auto f = table_->lookup(x, used_fallback);
      std::copy(f.begin(), f.end(), out.begin());
      return;
    }
  }
}

std::vector<double> Metric::embed(const Point& p, bool* used_fallback) const {
  std::vector<double> out(embedded_dim(p.dim()));
  embed(p.coords(), out, used_fallback);
  return out;
}

std::size_t Metric::embed_all(const PointMatrix& points, PointMatrix& out) const {
  out.dim = embedded_dim(points.dim);
  out.data.assign(points.rows() * out.dim, 0.0);
  std::size_t fallbacks = 0;
  for (std::size_t i = 0; i < points.rows(); ++i) {
    bool fb = false;
    embed(points.row(i), std::span<double>(out.data.data() + i * out.dim, out.dim), &fb);
    fallbacks += fb ? 1 : 0;
  }
  return fallbacks;
}

Metric Metric::state_metric(std::size_t state_dim) const {
  if (kind_ == Kind::weighted_euclidean) {
    if (state_dim > weights_.size()) throw Error(Errc::dimension_mismatch, "state dim exceeds metric weights");
    return weighted(std::vector<double>(weights_.begin(), weights_.begin() + static_cast<long>(state_dim)));
  }
  return euclidean();
}

std::string Metric::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::euclidean: os << "euclidean"; break;
    case Kind::weighted_euclidean:
      os << "weighted:";
      for (std::size_t k = 0; k < weights_.size(); ++k) os << (k ? "," : "") << weights_[k];
      break;
    case Kind::feature_table: os << "features(" << table_->feature_dim() << ")"; break;
  }
  return os.str();
}

double distance(const Metric& metric, const Point& p, const Point& q) {
  if (p.state_dim() != q.state_dim() || p.action_dim() != q.action_dim())
    throw Error(Errc::dimension_mismatch, "points have different dimensions");
  auto ep = metric.embed(p);
  auto eq = metric.embed(q);
  return euclid(ep, eq);
}

double covering_radius(std::span<const Point> data_points, std::span<const Point> probe_points,
                       const Metric& metric) {
  if (data_points.empty() || probe_points.empty())
    throw Error(Errc::empty_input, "covering radius needs data and probe points");
  PointMatrix data, probes;
  std::size_t d0 = data_points.front().dim();
  for (const auto& p : probe_points)
    if (p.dim() != d0) throw Error(Errc::dimension_mismatch, "probe dimension differs from data");
  metric.embed_all(to_matrix(data_points), data);
  metric.embed_all(to_matrix(probe_points), probes);
  std::vector<double> zeros(data.rows(), 0.0);
  double radius = 0.0;
  if (data.rows() >= 32) {
    AnchorTree tree(data.data, data.dim);
    tree.set_offsets(zeros);
    for (std::size_t i = 0; i < probes.rows(); ++i) radius = std::max(radius, tree.min_cone(probes.row(i), 1.0).value);
  } else {
    for (std::size_t i = 0; i < probes.rows(); ++i)
      radius = std::max(radius, min_cone_scan(data.data, data.dim, zeros, probes.row(i), 1.0).value);
  }
  return radius;
}

std::vector<Point> default_probes(std::span<const Point> points, std::uint64_t seed, std::size_t count) {
  if (points.empty()) throw Error(Errc::empty_input, "no points to bound");
  std::size_t dim = points.front().dim();
  std::size_t sd = points.front().state_dim(), ad = points.front().action_dim();
  std::vector<double> lo(dim, std::numeric_limits<double>::infinity());
  std::vector<double> hi(dim, -std::numeric_limits<double>::infinity());
  for (const auto& p : points) {
    for (std::size_t k = 0; k < dim; ++k) {
      lo[k] = std::min(lo[k], p[k]);
      hi[k] = std::max(hi[k], p[k]);
    }
  }
  std::vector<std::size_t> active;
  for (std::size_t k = 0; k < dim; ++k) {
    double pad = 0.05 * (hi[k] - lo[k]);
    lo[k] -= pad;
    hi[k] += pad;
    if (hi[k] > lo[k]) active.push_back(k);
  }

  std::vector<Point> out;
  if (active.empty()) {
    out.emplace_back(std::vector<double>(lo.begin(), lo.end()), sd, ad);
    return out;
  }
  if (active.size() <= 2) {
    std::size_t per_axis = active.size() == 1
                               ? count
                               : static_cast<std::size_t>(std::max(2.0, std::floor(std::sqrt(double(count)))));
    per_axis = std::max<std::size_t>(per_axis, 2);
    std::size_t total = active.size() == 1 ? per_axis : per_axis * per_axis;
    out.reserve(total);
    for (std::size_t idx = 0; idx < total; ++idx) {
      std::vector<double> c(lo.begin(), lo.end());
      std::size_t rem = idx;
      for (std::size_t a : active) {
        std::size_t g = rem % per_axis;
        rem /= per_axis;
        c[a] = lo[a] + (hi[a] - lo[a]) * static_cast<double>(g) / static_cast<double>(per_axis - 1);
      }
      out.emplace_back(std::move(c), sd, ad);
    }
    return out;
  }
  Rng rng(derive_seed(seed, streams::probes, 0));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<double> c(lo.begin(), lo.end());
    for (std::size_t a : active) c[a] = lo[a] + (hi[a] - lo[a]) * u(rng);
    out.emplace_back(std::move(c), sd, ad);
  }
  return out;
}

}  // namespace lipvi
