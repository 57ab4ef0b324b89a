#include "sparsereg/rate_fit.hpp"

#include "sparsereg/types.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace sparsereg {

RateEstimate fit_rate(std::span<const double> deltas, std::span<const double> errors) {
  if (deltas.size() != errors.size()) throw InvalidArgument("fit_rate: length mismatch");
  if (deltas.size() < 2) throw NumericalError("fit_rate: need at least two points");

  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] > 0.0) || !(errors[i] > 0.0)) {
      throw InvalidArgument("fit_rate: deltas and errors must be positive");
    }
    x.push_back(std::log(deltas[i]));
    y.push_back(std::log(errors[i]));
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw NumericalError("fit_rate: all deltas are equal");

  RateEstimate fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.n_points = static_cast<int>(x.size());
  if (syy == 0.0) {
    fit.r_squared = 1.0;
  } else {
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double e = y[i] - (fit.intercept + fit.slope * x[i]);
      ss_res += e * e;
    }
    fit.r_squared = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  }
  return fit;
}

}  // namespace sparsereg
