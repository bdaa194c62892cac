#include "lipvi/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lipvi/error.hpp"

namespace lipvi {

// ---------------------------------------------------------------------------
// Dense two-phase simplex on  min c^T y,  A y = b,  y >= 0.

namespace {

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : m_(rows), n_(cols), t_(rows * (cols + 1), 0.0), basis_(rows) {}

  double& at(std::size_t r, std::size_t c) { return t_[r * (n_ + 1) + c]; }
  double at(std::size_t r, std::size_t c) const { return t_[r * (n_ + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, n_); }
  std::size_t rows() const { return m_; }
  std::size_t cols() const { return n_; }
  std::vector<std::size_t>& basis() { return basis_; }

  void pivot(std::size_t r, std::size_t c) {
    double p = at(r, c);
    for (std::size_t k = 0; k <= n_; ++k) at(r, k) /= p;
    at(r, c) = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      double f = at(i, c);
      if (f == 0.0) continue;
      for (std::size_t k = 0; k <= n_; ++k) at(i, k) -= f * at(r, k);
      at(i, c) = 0.0;
    }
    basis_[r] = c;
  }

  void remove_row(std::size_t r) {
    t_.erase(t_.begin() + static_cast<long>(r * (n_ + 1)), t_.begin() + static_cast<long>((r + 1) * (n_ + 1)));
    basis_.erase(basis_.begin() + static_cast<long>(r));
    --m_;
  }

 private:
  std::size_t m_, n_;
  std::vector<double> t_;
  std::vector<std::size_t> basis_;
};

enum class Phase { optimal, unbounded };

// Minimizes cost over the columns allowed[c]; Bland's rule for both the
// entering and the leaving variable.
Phase simplex(Tableau& tab, std::span<const double> cost, const std::vector<bool>& allowed, double tol) {
  const std::size_t m = tab.rows(), n = tab.cols();
  std::vector<double> dual(m);
  for (;;) {
    for (std::size_t r = 0; r < m; ++r) dual[r] = cost[tab.basis()[r]];
    std::size_t enter = n;
    for (std::size_t c = 0; c < n; ++c) {
      if (!allowed[c]) continue;
      double reduced = cost[c];
      for (std::size_t r = 0; r < m; ++r) reduced -= dual[r] * tab.at(r, c);
      if (reduced < -tol) {
        enter = c;
        break;
      }
    }
    if (enter == n) return Phase::optimal;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < m; ++r)
      if (tab.at(r, enter) > tol) best = std::min(best, tab.rhs(r) / tab.at(r, enter));
    if (best == std::numeric_limits<double>::infinity()) return Phase::unbounded;
    std::size_t leave = m;
    for (std::size_t r = 0; r < m; ++r) {
      if (tab.at(r, enter) <= tol || tab.rhs(r) / tab.at(r, enter) > best + tol) continue;
      if (leave == m || tab.basis()[r] < tab.basis()[leave]) leave = r;
    }
    tab.pivot(leave, enter);
  }
}

}  // namespace

LpResult solve_standard_lp(const std::vector<std::vector<double>>& A, std::span<const double> b,
                           std::span<const double> c, double tol) {
  const std::size_t m = A.size();
  const std::size_t n = c.size();
  if (b.size() != m) throw Error(Errc::length_mismatch, "b must have one entry per row");
  for (const auto& row : A)
    if (row.size() != n) throw Error(Errc::length_mismatch, "every row of A needs one entry per column");

  // Columns [0, n) original, [n, n + m) artificial.
  Tableau tab(m, n + m);
  for (std::size_t r = 0; r < m; ++r) {
    double sign = b[r] < 0.0 ? -1.0 : 1.0;
    for (std::size_t k = 0; k < n; ++k) tab.at(r, k) = sign * A[r][k];
    tab.at(r, n + r) = 1.0;
    tab.rhs(r) = sign * b[r];
    tab.basis()[r] = n + r;
  }

  std::vector<double> phase1(n + m, 0.0);
  std::fill(phase1.begin() + static_cast<long>(n), phase1.end(), 1.0);
  std::vector<bool> allowed(n + m, true);
  simplex(tab, phase1, allowed, tol);
  double infeas = 0.0;
  for (std::size_t r = 0; r < tab.rows(); ++r)
    if (tab.basis()[r] >= n) infeas += tab.rhs(r);
  double scale = 1.0;
  for (double v : b) scale = std::max(scale, std::abs(v));
  if (infeas > tol * scale * static_cast<double>(std::max<std::size_t>(m, 1)))
    return {LpResult::Status::infeasible, 0.0, {}};

  // Drive remaining artificials out of the basis; drop redundant rows.
  for (std::size_t r = 0; r < tab.rows();) {
    if (tab.basis()[r] < n) {
      ++r;
      continue;
    }
    std::size_t col = n;
    for (std::size_t k = 0; k < n; ++k) {
      if (std::abs(tab.at(r, k)) > tol) {
        col = k;
        break;
      }
    }
    if (col == n) {
      tab.remove_row(r);
    } else {
      tab.pivot(r, col);
      ++r;
    }
  }

  std::vector<double> phase2(n + m, 0.0);
  std::copy(c.begin(), c.end(), phase2.begin());
  std::fill(allowed.begin() + static_cast<long>(n), allowed.end(), false);
  if (simplex(tab, phase2, allowed, tol) == Phase::unbounded) return {LpResult::Status::unbounded, 0.0, {}};

  LpResult res{LpResult::Status::optimal, 0.0, std::vector<double>(n, 0.0)};
  for (std::size_t r = 0; r < tab.rows(); ++r)
    if (tab.basis()[r] < n) res.y[tab.basis()[r]] = tab.rhs(r);
  for (std::size_t k = 0; k < n; ++k) res.value += c[k] * res.y[k];
  return res;
}

// ---------------------------------------------------------------------------

namespace {

// Distinct points of the instance in the metric's embedding.
struct PointSet {
  PointMatrix embedded;
  std::vector<std::size_t> anchor_id;
  std::vector<std::size_t> next_id;
  std::vector<std::size_t> init_id;

  std::size_t size() const { return embedded.rows(); }

  std::size_t add(std::span<const double> x) {
    for (std::size_t p = 0; p < embedded.rows(); ++p)
      if (euclid(embedded.row(p), x) <= kZeroDistance) return p;
    if (embedded.rows() >= kOracleMaxPoints)
      throw Error(Errc::instance_too_large, "oracle is limited to " + std::to_string(kOracleMaxPoints) + " points");
    embedded.push(x);
    return embedded.rows() - 1;
  }
};

PointSet collect_points(const FrozenBellman& fb, std::span<const Point> init_points, const Metric& metric) {
  PointSet ps;
  std::vector<double> buf(metric.embedded_dim(fb.anchors().dim));
  ps.embedded.dim = buf.size();
  for (std::size_t i = 0; i < fb.size(); ++i) {
    metric.embed(fb.anchors().row(i), buf);
    ps.anchor_id.push_back(ps.add(buf));
  }
  for (std::size_t k = 0; k < fb.total_support(); ++k) {
    metric.embed(fb.next_points().row(k), buf);
    ps.next_id.push_back(ps.add(buf));
  }
  for (const auto& p : init_points) {
    if (p.state_dim() != fb.state_dim() || p.action_dim() != fb.action_dim())
      throw Error(Errc::dimension_mismatch, "initial point dimensions differ from the data");
    metric.embed(p.coords(), buf);
    ps.init_id.push_back(ps.add(buf));
  }
  return ps;
}

// Inequality rows  g^T v <= h  of the primal.
struct Rows {
  std::vector<std::vector<double>> g;
  std::vector<double> h;
};

void lipschitz_rows(const PointSet& ps, double eta, Rows& rows) {
  const std::size_t P = ps.size();
  for (std::size_t p = 0; p < P; ++p) {
    for (std::size_t q = 0; q < P; ++q) {
      if (p == q) continue;
      std::vector<double> g(P, 0.0);
      g[p] = 1.0;
      g[q] = -1.0;
      rows.g.push_back(std::move(g));
      rows.h.push_back(eta * euclid(ps.embedded.row(p), ps.embedded.row(q)));
    }
  }
}

// v_{x_i} - gamma sum_k w_k v_{x'_ik} (<= r_i when sign = +1, >= r_i when -1).
void bellman_rows(const FrozenBellman& fb, const PointSet& ps, double sign, Rows& rows) {
  const std::size_t P = ps.size();
  for (std::size_t i = 0; i < fb.size(); ++i) {
    std::vector<double> g(P, 0.0);
    g[ps.anchor_id[i]] += 1.0;
    for (std::size_t k = fb.support_begin(i); k < fb.support_end(i); ++k)
      g[ps.next_id[k]] -= fb.gamma() * fb.weights()[k];
    for (double& v : g) v *= sign;
    rows.g.push_back(std::move(g));
    rows.h.push_back(sign * fb.reward(i));
  }
}

// max obj^T v subject to rows, v free, solved through its dual
//   min h^T y  s.t.  G^T y = obj,  y >= 0.
LpResult solve_primal_max(const Rows& rows, std::span<const double> obj) {
  const std::size_t P = obj.size();
  const std::size_t m = rows.g.size();
  std::vector<std::vector<double>> A(P, std::vector<double>(m, 0.0));
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t p = 0; p < P; ++p) A[p][r] = rows.g[r][p];
  return solve_standard_lp(A, obj, rows.h);
}

void check_eta(double eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw Error(Errc::invalid_argument, "eta must be positive");
}

}  // namespace

bool bellman_equalities_feasible(const FrozenBellman& fb, double eta, const Metric& metric) {
  check_eta(eta);
  PointSet ps = collect_points(fb, {}, metric);
  Rows rows;
  lipschitz_rows(ps, eta, rows);
  bellman_rows(fb, ps, 1.0, rows);
  bellman_rows(fb, ps, -1.0, rows);
  std::vector<double> zero(ps.size(), 0.0);
  return solve_primal_max(rows, zero).status != LpResult::Status::unbounded;
}

double lp_bound(const FrozenBellman& fb, std::span<const Point> init_points, double eta, const Metric& metric,
                Direction direction) {
  check_eta(eta);
  if (init_points.empty()) throw Error(Errc::empty_input, "no initial points");
  PointSet ps = collect_points(fb, init_points, metric);
  if (!bellman_equalities_feasible(fb, eta, metric))
    throw Error(Errc::infeasible, "no eta-Lipschitz labeling satisfies the Bellman equations");

  const double sign = direction == Direction::upper ? 1.0 : -1.0;
  Rows rows;
  lipschitz_rows(ps, eta, rows);
  bellman_rows(fb, ps, sign, rows);
  std::vector<double> obj(ps.size(), 0.0);
  for (std::size_t id : ps.init_id) obj[id] += sign / static_cast<double>(init_points.size());

  LpResult res = solve_primal_max(rows, obj);
  switch (res.status) {
    case LpResult::Status::unbounded: throw Error(Errc::infeasible, "bound program is infeasible");
    case LpResult::Status::infeasible: throw Error(Errc::unbounded, "bound program is unbounded");
    case LpResult::Status::optimal: break;
  }
  return sign * res.value;
}

// ---------------------------------------------------------------------------

double grid_envelope_optimality(const EnvelopeState& caps, std::span<const Point> probe_grid,
                                const std::function<double(const Point&)>& candidate) {
  const bool upper = caps.direction() == Direction::upper;
  const double eta = caps.eta();
  const auto anchors = caps.anchors();
  const auto q = caps.q();

  std::vector<Point> probes(anchors.begin(), anchors.end());
  probes.insert(probes.end(), probe_grid.begin(), probe_grid.end());
  std::vector<double> cand(probes.size());
  for (std::size_t p = 0; p < probes.size(); ++p) cand[p] = candidate(probes[p]);

  double worst = 0.0;
  for (std::size_t p = 0; p < probes.size(); ++p) {
    double apex = upper ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < anchors.size(); ++j) {
      double d = distance(caps.metric(), probes[p], anchors[j]);
      apex = upper ? std::min(apex, q[j] + eta * d) : std::max(apex, q[j] - eta * d);
    }
    worst = std::max(worst, upper ? apex - cand[p] : cand[p] - apex);
  }
  for (std::size_t j = 0; j < anchors.size(); ++j) worst = std::max(worst, upper ? cand[j] - q[j] : q[j] - cand[j]);
  for (std::size_t p = 0; p < probes.size(); ++p)
    for (std::size_t s = p + 1; s < probes.size(); ++s)
      worst = std::max(worst, std::abs(cand[p] - cand[s]) - eta * distance(caps.metric(), probes[p], probes[s]));
  return worst;
}

double grid_envelope_optimality(const EnvelopeState& state, std::span<const Point> probe_grid) {
  return grid_envelope_optimality(state, probe_grid, [&state](const Point& x) { return eval(state, x); });
}

}  // namespace lipvi
