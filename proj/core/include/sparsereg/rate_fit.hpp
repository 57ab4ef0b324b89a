#pragma once

#include <span>

namespace sparsereg {

/// Least-squares line through (log delta, log error).
struct RateEstimate {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int n_points = 0;
};

/// Requires at least two points with positive delta and error.
RateEstimate fit_rate(std::span<const double> deltas, std::span<const double> errors);

}  // namespace sparsereg
