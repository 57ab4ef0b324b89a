#pragma once

#include "sparsereg/experiments.hpp"

#include <string>

namespace sparsereg::cli {

/// Log-log plot of a sweep: per-trial errors, per-delta means, the fitted
/// line and a reference line of slope `reference_slope`.
std::string render_rate_svg(const SweepResult& sweep, double reference_slope);

}  // namespace sparsereg::cli
