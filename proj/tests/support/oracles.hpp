#pragma once

// Independent reference computations used by the unit and acceptance tests.
// None of these call into the library's numerical kernels.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>

namespace oracle {

/// Minimizer of a unimodal f on [lo, hi] by golden-section search.
/// Function values only resolve the minimizer to about sqrt(epsilon), so
/// callers needing 1e-8 accuracy evaluate f in long double.
template <class Real>
Real golden_min(const std::function<Real(Real)>& f, Real lo, Real hi, Real tol) {
  const Real g = (std::sqrt(Real(5)) - 1) / 2;
  Real a = lo;
  Real b = hi;
  Real c = b - g * (b - a);
  Real d = a + g * (b - a);
  Real fc = f(c);
  Real fd = f(d);
  while (b - a > tol * (1 + std::abs(a) + std::abs(b))) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  Real best = (a + b) / 2;
  // endpoints matter when the minimizer sits at a kink (e.g. 0)
  for (Real x : {lo, hi}) {
    if (f(x) < f(best)) best = x;
  }
  return best;
}

inline double golden_min(const std::function<double(double)>& f, double lo, double hi,
                         double tol = 1e-13) {
  return golden_min<double>(f, lo, hi, tol);
}

/// argmin_x 0.5 (x - z)^2 + tau_w |x|^q via a coarse grid then golden
/// section, all in long double.
inline double prox_scalar(double z, double tau_w, double q) {
  using L = long double;
  const L zl = z;
  const std::function<L(L)> f = [&](L x) {
    return L(0.5) * (x - zl) * (x - zl) + L(tau_w) * std::pow(std::abs(x), L(q));
  };
  const L lo = std::min(L(0), zl);
  const L hi = std::max(L(0), zl);
  if (lo == hi) return 0.0;
  constexpr int kGrid = 2000;
  int best = 0;
  L fbest = std::numeric_limits<L>::infinity();
  for (int i = 0; i <= kGrid; ++i) {
    const L fx = f(lo + (hi - lo) * i / kGrid);
    if (fx < fbest) {
      fbest = fx;
      best = i;
    }
  }
  const L a = lo + (hi - lo) * std::max(0, best - 1) / kGrid;
  const L b = lo + (hi - lo) * std::min(kGrid, best + 1) / kGrid;
  return static_cast<double>(golden_min<L>(f, a, b, L(1e-17)));
}

/// Two-point ratio
///   (|a|^{2-q} + |b-a|^{2-q}) (|b|^q - |a|^q - q |a|^{q-1} sgn(a) (b-a)) / (b-a)^2
/// in long double. When a and b share a sign the bracket is rewritten as
/// |a|^q ((1+t)^q - 1 - q t) with t = (b-a)/a and evaluated through
/// expm1/log1p to avoid cancellation.
inline long double dq_ratio(long double a, long double b, long double q) {
  const long double d = b - a;
  long double bracket;
  if (a != 0 && (a > 0) == (b > 0) && b != 0) {
    const long double t = d / a;
    bracket = std::pow(std::abs(a), q) * (std::expm1(q * std::log1p(t)) - q * t);
  } else {
    const long double sa = a > 0 ? 1.0L : (a < 0 ? -1.0L : 0.0L);
    bracket = std::pow(std::abs(b), q) - std::pow(std::abs(a), q) -
              q * std::pow(std::abs(a), q - 1) * sa * d;
  }
  const long double pre = std::pow(std::abs(a), 2 - q) + std::pow(std::abs(d), 2 - q);
  return pre * bracket / (d * d);
}

/// Smallest ratio over a log-spaced sweep of a in +-[1e-4, A] with
/// b = a +- 1 (the ratio is invariant under joint scaling). The bracket
/// carries a relative rounding error of about 2 eps / ((q - 1) t) for
/// t = 1/|a|, so A is capped where that stays below 1e-8. An upper
/// estimate of the infimum; close to it only when the approach as
/// |a| -> infinity is fast enough to be visible by A.
inline double dq_sweep(double q) {
  const long double eps = std::numeric_limits<long double>::epsilon();
  long double top = 1e13L;
  if (q < 2.0) top = std::min(top, 1e-8L * (q - 1.0L) / (2.0L * eps));
  const long double lo = -4.0L;
  const long double hi = std::log10(top);
  long double best = std::numeric_limits<long double>::infinity();
  constexpr int kPoints = 6000;
  for (int i = 0; i <= kPoints; ++i) {
    const long double mag = std::pow(10.0L, lo + (hi - lo) * i / kPoints);
    for (long double a : {mag, -mag}) {
      for (long double step : {1.0L, -1.0L}) best = std::min(best, dq_ratio(a, a + step, q));
    }
  }
  best = std::min(best, dq_ratio(0.0L, 1.0L, q));
  return static_cast<double>(best);
}

/// Largest eigenvalue of A^T A from a dense symmetric eigensolver.
inline double norm_sq(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a.transpose() * a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

/// Smallest singular value from a dense SVD (0 if cols > rows).
inline double sigma_min(const Eigen::MatrixXd& a) {
  if (a.cols() == 0) return std::numeric_limits<double>::infinity();
  if (a.cols() > a.rows()) return 0.0;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
  return svd.singularValues().minCoeff();
}

}  // namespace oracle
