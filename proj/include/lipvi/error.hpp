#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lipvi {

enum class Errc {
  dimension_mismatch,
  feature_lookup_miss,
  empty_input,
  invalid_gamma,
  index_out_of_range,
  length_mismatch,
  empty_subset,
  eta_exhausted,
  duplicate_conflict,
  too_few_rows,
  contraction_violated,
  instance_too_large,
  infeasible,
  unbounded,
  zero_behavior_density,
  invalid_delta,
  invalid_argument,
  io_error,
  parse_error,
};

std::string_view to_string(Errc code);

/// Library exception. Every failure mode named by an operation contract maps
/// to one Errc value so callers (and the CLI exit-code table) can dispatch on it.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// 0 <= gamma < 1. gamma == 0 is the one-step (bandit) degenerate case.
void check_gamma(double gamma);

}  // namespace lipvi
