#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "lipvi/bellman.hpp"
#include "lipvi/envelope.hpp"
#include "lipvi/metric.hpp"

namespace lipvi {

inline constexpr std::size_t kOracleMaxPoints = 60;

/// Finite linear program over the values v_p at every distinct point of
/// anchors, frozen next points and init points:
///
///   upper:  max mean_z v_z   s.t.  v_p - v_q <= eta d(p,q)            all ordered pairs
///                                  v_{x_i} <= r_i + gamma sum_k w_k v_{x'_ik}
///   lower:  min mean_z v_z   with the Bellman rows reversed (>=).
///
/// Restricting F_eta to a finite set loses nothing: the program only reads
/// those values, and any feasible labeling extends to an eta-Lipschitz
/// function on the whole space (McShane).
///
/// Before optimizing, checks that some labeling satisfies the Bellman rows
/// with equality; if none does, throws infeasible (eta is too small for the
/// data). Throws instance_too_large above kOracleMaxPoints points.
double lp_bound(const FrozenBellman& fb, std::span<const Point> init_points, double eta, const Metric& metric,
                Direction direction);

/// Feasibility of  v_{x_i} = B v(x_i)  for all i over eta-Lipschitz labelings.
bool bellman_equalities_feasible(const FrozenBellman& fb, double eta, const Metric& metric);

/// Largest amount by which a feasible function beats the candidate envelope.
///
/// For each probe p the cone c_p -/+ eta d(., p) with the tightest apex c_p
/// that still respects every anchor cap is feasible; the candidate must reach
/// it at p. Also charges cap violations at the anchors and Lipschitz
/// violations between probe pairs. Anchors are always checked.
double grid_envelope_optimality(const EnvelopeState& caps, std::span<const Point> probe_grid,
                                const std::function<double(const Point&)>& candidate);

/// Checks eval(state, .) against the state's own caps.
double grid_envelope_optimality(const EnvelopeState& state, std::span<const Point> probe_grid);

/// Dense two-phase simplex (Bland's rule) for  min c^T y  s.t.  A y = b, y >= 0.
struct LpResult {
  enum class Status { optimal, infeasible, unbounded } status;
  double value;
  std::vector<double> y;
};
LpResult solve_standard_lp(const std::vector<std::vector<double>>& A, std::span<const double> b,
                           std::span<const double> c, double tol = 1e-9);

}  // namespace lipvi
