#include "sparsereg/penalty.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <string>

namespace sparsereg {

namespace {

double sgn(double x) { return (x > 0.0) - (x < 0.0); }

void require_matching(const CoefficientVector& u, const PenaltySpec& spec) {
  if (static_cast<std::size_t>(u.size()) != spec.size()) {
    throw InvalidArgument("coefficient length " + std::to_string(u.size()) +
                          " does not match penalty length " +
                          std::to_string(spec.size()));
  }
}

// ---- d_q ---------------------------------------------------------------
//
// The ratio is invariant under (a, b) -> (t a, t b) for t != 0, so we fix
// b - a = 1 and minimize over a single real a. For |a| > kSwitch we switch
// to x = 1/a and evaluate with the binomial series, which removes the
// cancellation in |a+1|^q - |a|^q - q|a|^{q-1}sgn(a) and makes the limit
// |a| -> infinity the ordinary point x = 0.

constexpr double kSwitch = 8.0;

// sum_{k>=2} C(q,k) x^{k-2}, |x| <= 1/8.
double binomial_tail_over_x2(double q, double x) {
  double coeff = q * (q - 1.0) / 2.0;  // C(q, 2)
  double power = 1.0;
  double sum = coeff;
  for (int k = 3; k < 60; ++k) {
    coeff *= (q - (k - 1)) / k;
    power *= x;
    const double term = coeff * power;
    sum += term;
    if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

// Ratio with b = a + 1 (|a| <= kSwitch).
double ratio_near(double q, double a) {
  const double abs_a = std::abs(a);
  const double bracket = std::pow(std::abs(a + 1.0), q) - std::pow(abs_a, q) -
                         q * std::pow(abs_a, q - 1.0) * sgn(a);
  return (std::pow(abs_a, 2.0 - q) + 1.0) * bracket;
}

// Ratio with a = 1/x (|x| <= 1/kSwitch); x = 0 is the limit |a| -> inf.
double ratio_far(double q, double x) {
  return binomial_tail_over_x2(q, x) * (1.0 + std::pow(std::abs(x), 2.0 - q));
}

template <class F>
double golden_min(F&& f, double lo, double hi, int iterations) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  for (int i = 0; i < iterations; ++i) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
  }
  return std::min({fc, fd, f(lo), f(hi)});
}

template <class F>
double grid_then_refine(F&& f, double lo, double hi, int points) {
  const double h = (hi - lo) / (points - 1);
  double best = std::numeric_limits<double>::infinity();
  int best_i = 0;
  for (int i = 0; i < points; ++i) {
    const double value = f(lo + h * i);
    if (value < best) {
      best = value;
      best_i = i;
    }
  }
  const double a = lo + h * std::max(best_i - 1, 0);
  const double b = lo + h * std::min(best_i + 1, points - 1);
  return std::min(best, golden_min(f, a, b, 80));
}

double compute_dq(double q) {
  constexpr int kPoints = 20001;
  const double near = grid_then_refine(
      [q](double a) { return ratio_near(q, a); }, -kSwitch, kSwitch, kPoints);
  const double far = grid_then_refine(
      [q](double x) { return ratio_far(q, x); }, -1.0 / kSwitch, 1.0 / kSwitch,
      kPoints);
  return std::min(near, far);
}

// ---- prox ----------------------------------------------------------------

// Root of x + c x^{q-1} = a on [0, a], a > 0, c > 0, 1 < q < 2.
double solve_prox_stationarity(double a, double c, double q) {
  const double tol = std::max(1e-12, 4.0 * std::numeric_limits<double>::epsilon() * a);
  const auto phi = [&](double x) { return x + c * std::pow(x, q - 1.0) - a; };
  const auto dphi = [&](double x) {
    return 1.0 + c * (q - 1.0) * std::pow(x, q - 2.0);
  };

  double lo = 0.0;
  double hi = a;
  // Both bounds are upper bounds on the root; the smaller is the better start.
  double x = std::min(a, std::pow(a / c, 1.0 / (q - 1.0)));
  if (!(x > 0.0)) return 0.0;  // underflow: root is below representable range
  hi = x;

  for (int it = 0; it < 100; ++it) {
    const double f = phi(x);
    if (f == 0.0) return x;
    if (f < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    double next = x - f / dphi(x);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= tol || hi - lo <= tol) return next;
    x = next;
  }
  return x;
}

}  // namespace

PenaltySpec::PenaltySpec(double q, Eigen::VectorXd weights)
    : q_(q), weights_(std::move(weights)), w_min_(0.0) {
  if (!(q >= 1.0 && q <= 2.0)) {
    throw InvalidArgument("penalty exponent q must lie in [1, 2], got " +
                          std::to_string(q));
  }
  if (weights_.size() == 0) {
    throw InvalidArgument("penalty needs at least one weight");
  }
  if (!weights_.allFinite() || (weights_.array() <= 0.0).any()) {
    throw InvalidArgument("penalty weights must be finite and positive");
  }
  w_min_ = weights_.minCoeff();
}

PenaltySpec PenaltySpec::uniform(double q, std::size_t n, double weight) {
  return PenaltySpec(q, Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), weight));
}

double sequence_norm(const Eigen::VectorXd& c, double s) {
  if (!(s > 0.0)) throw InvalidArgument("sequence_norm needs s > 0");
  const double scale = c.size() == 0 ? 0.0 : c.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < c.size(); ++i) sum += std::pow(std::abs(c[i]) / scale, s);
  return scale * std::pow(sum, 1.0 / s);
}

double eval_rq(const CoefficientVector& u, const PenaltySpec& spec) {
  require_matching(u, spec);
  const double q = spec.q();
  if (q == 1.0) return spec.weights().dot(u.cwiseAbs());
  if (q == 2.0) return spec.weights().dot(u.cwiseAbs2());
  return spec.weights().dot(u.array().abs().pow(q).matrix());
}

CoefficientVector subgradient_rq(const CoefficientVector& u,
                                 const PenaltySpec& spec) {
  require_matching(u, spec);
  const double q = spec.q();
  const auto& w = spec.weights();
  CoefficientVector xi(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (q == 1.0) {
      xi[i] = w[i] * sgn(u[i]);
    } else {
      xi[i] = q * w[i] * std::pow(std::abs(u[i]), q - 1.0) * sgn(u[i]);
    }
  }
  return xi;
}

bool SubgradientInterval::contains(const CoefficientVector& xi, double tol) const {
  if (xi.size() != lower.size()) return false;
  for (Eigen::Index i = 0; i < xi.size(); ++i) {
    const double scale = 1.0 + std::max(std::abs(lower[i]), std::abs(upper[i]));
    if (xi[i] < lower[i] - tol * scale || xi[i] > upper[i] + tol * scale) {
      return false;
    }
  }
  return true;
}

SubgradientInterval subgradient_interval(const CoefficientVector& u,
                                         const PenaltySpec& spec) {
  CoefficientVector xi = subgradient_rq(u, spec);
  SubgradientInterval out{xi, xi};
  if (spec.q() == 1.0) {
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      if (u[i] == 0.0) {
        out.lower[i] = -spec.weights()[i];
        out.upper[i] = spec.weights()[i];
      }
    }
  }
  return out;
}

BregmanReport bregman_distance(const CoefficientVector& u_tilde,
                               const CoefficientVector& u,
                               const PenaltySpec& spec,
                               const CoefficientVector& xi) {
  require_matching(u_tilde, spec);
  require_matching(u, spec);
  require_matching(xi, spec);
  if (!subgradient_interval(u, spec).contains(xi)) {
    throw InvalidArgument("xi is not a subgradient of R_q at u");
  }

  const double q = spec.q();
  const auto& w = spec.weights();
  // Coordinatewise terms are each nonnegative; summing them avoids the
  // cancellation of R(u~) - R(u) - <xi, u~-u> for nearby points.
  double value = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double term = w[i] * (std::pow(std::abs(u_tilde[i]), q) -
                                std::pow(std::abs(u[i]), q)) -
                        xi[i] * (u_tilde[i] - u[i]);
    value += term;
  }

  BregmanReport report;
  report.value = value;
  if (q > 1.0) {
    const double denom = 3.0 * spec.w_min() + 2.0 * eval_rq(u, spec) + eval_rq(u_tilde, spec);
    report.lower_bound = bregman_constant(spec) * (u_tilde - u).squaredNorm() / denom;
  }
  report.slack = report.value - report.lower_bound;
  return report;
}

double dq_constant(double q) {
  if (!(q > 1.0 && q <= 2.0)) {
    throw InvalidArgument("dq_constant requires 1 < q <= 2, got " + std::to_string(q));
  }
  static std::mutex mutex;
  static std::map<double, double> cache;
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(q); it != cache.end()) return it->second;
  }
  const double value = compute_dq(q);
  std::lock_guard lock(mutex);
  cache.emplace(q, value);
  return value;
}

double bregman_constant(const PenaltySpec& spec) {
  return dq_constant(spec.q()) * spec.w_min() * spec.w_min();
}

double prox_scalar(double z, double tau_w, double q) {
  if (z == 0.0) return 0.0;
  const double a = std::abs(z);
  if (q == 1.0) return sgn(z) * std::max(a - tau_w, 0.0);
  if (q == 2.0) return z / (1.0 + 2.0 * tau_w);
  return sgn(z) * solve_prox_stationarity(a, tau_w * q, q);
}

CoefficientVector prox_rq(const CoefficientVector& z, double tau,
                          const PenaltySpec& spec) {
  require_matching(z, spec);
  if (!(tau > 0.0)) throw InvalidArgument("prox step tau must be positive");
  CoefficientVector x(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    x[i] = prox_scalar(z[i], tau * spec.weights()[i], spec.q());
  }
  return x;
}

}  // namespace sparsereg
