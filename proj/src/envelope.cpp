#include "lipvi/envelope.hpp"

#include <cmath>
#include <limits>

#include "lipvi/error.hpp"
#include "lipvi/parallel.hpp"

namespace lipvi {

EnvelopeKernel::EnvelopeKernel(PointMatrix anchors, double eta, Direction direction)
    : anchors_(std::move(anchors)), eta_(eta), direction_(direction) {
  if (anchors_.rows() == 0) throw Error(Errc::empty_input, "envelope needs at least one anchor");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw Error(Errc::invalid_argument, "eta must be positive");
  q_.assign(anchors_.rows(), 0.0);
  offsets_.assign(anchors_.rows(), 0.0);
  if (anchors_.rows() >= kTreeThreshold) tree_ = std::make_unique<AnchorTree>(anchors_.data, anchors_.dim);
}

void EnvelopeKernel::set_labels(std::span<const double> q) {
  if (q.size() != anchors_.rows()) throw Error(Errc::length_mismatch, "one label per anchor");
  for (std::size_t j = 0; j < q.size(); ++j) {
    if (!std::isfinite(q[j])) throw Error(Errc::invalid_argument, "labels must be finite");
    q_[j] = q[j];
    offsets_[j] = direction_ == Direction::upper ? q[j] : -q[j];
  }
  if (tree_) tree_->set_offsets(offsets_);
}

double EnvelopeKernel::eval(std::span<const double> x, std::size_t* argmin, std::size_t hint) const {
  if (!tree_) return eval_scan(x, argmin);
  auto hit = tree_->min_cone(x, eta_, hint);
  if (argmin) *argmin = hit.index;
  return direction_ == Direction::upper ? hit.value : -hit.value;
}

double EnvelopeKernel::eval_scan(std::span<const double> x, std::size_t* argmin) const {
  auto hit = min_cone_scan(anchors_.data, anchors_.dim, offsets_, x, eta_);
  if (argmin) *argmin = hit.index;
  return direction_ == Direction::upper ? hit.value : -hit.value;
}

void EnvelopeKernel::eval_rows(const PointMatrix& rows, std::span<double> out) const {
  if (rows.rows() != out.size()) throw Error(Errc::length_mismatch, "output size differs from query count");
  if (rows.rows() > 0 && rows.dim != anchors_.dim)
    throw Error(Errc::dimension_mismatch, "query dimension differs from anchors");
  parallel_blocks(rows.rows(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) out[i] = eval(rows.row(i));
  });
}

// ---------------------------------------------------------------------------

EnvelopeState::EnvelopeState(std::vector<Point> anchors, std::vector<double> q, double eta, Direction direction,
                             Metric metric)
    : anchors_(std::move(anchors)), q_(std::move(q)), eta_(eta), direction_(direction), metric_(std::move(metric)) {
  if (anchors_.empty()) throw Error(Errc::empty_input, "envelope needs at least one anchor");
  if (anchors_.size() != q_.size()) throw Error(Errc::length_mismatch, "one label per anchor");
  for (const auto& a : anchors_)
    if (a.state_dim() != anchors_.front().state_dim() || a.action_dim() != anchors_.front().action_dim())
      throw Error(Errc::dimension_mismatch, "anchors have different dimensions");
  PointMatrix embedded;
  metric_.embed_all(to_matrix(anchors_), embedded);
  kernel_ = std::make_shared<EnvelopeKernel>(std::move(embedded), eta, direction);
  kernel_->set_labels(q_);
}

namespace {

void check_dims(const EnvelopeState& state, const Point& x) {
  const Point& a = state.anchors().front();
  if (x.state_dim() != a.state_dim() || x.action_dim() != a.action_dim())
    throw Error(Errc::dimension_mismatch, "query point dimensions differ from anchors");
}

}  // namespace

double eval(const EnvelopeState& state, const Point& x) {
  check_dims(state, x);
  return state.kernel().eval(state.metric().embed(x));
}

std::size_t binding_anchor(const EnvelopeState& state, const Point& x) {
  check_dims(state, x);
  std::size_t j = 0;
  state.kernel().eval(state.metric().embed(x), &j);
  return j;
}

std::vector<double> eval_batch(const EnvelopeState& state, std::span<const Point> xs) {
  for (const auto& x : xs) check_dims(state, x);
  std::vector<double> out(xs.size());
  if (xs.empty()) return out;
  PointMatrix embedded;
  state.metric().embed_all(to_matrix(xs), embedded);
  state.kernel().eval_rows(embedded, out);
  return out;
}

double expected_value(const EnvelopeState& state, std::span<const Point> init_points) {
  if (init_points.empty()) throw Error(Errc::empty_input, "no initial points");
  auto values = eval_batch(state, init_points);
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

std::vector<std::size_t> crossing_indices(std::span<const double> upper, std::span<const double> lower) {
  if (upper.size() != lower.size()) throw Error(Errc::length_mismatch, "upper and lower lengths differ");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < upper.size(); ++i)
    if (upper[i] < lower[i] - 1e-12) out.push_back(i);
  return out;
}

}  // namespace lipvi
