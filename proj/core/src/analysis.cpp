#include "sparsereg/analysis.hpp"

#include "sparsereg/random.hpp"

#include <algorithm>
#include <cmath>

namespace sparsereg {

namespace {

constexpr double kCertificateTol = 1e-8;
constexpr double kSampleSlack = -1e-9;
constexpr std::size_t kMaxReportedViolations = 16;

Matrix columns(const Matrix& k, const std::vector<Eigen::Index>& idx) {
  Matrix out(k.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) {
    out.col(static_cast<Eigen::Index>(j)) = k.col(idx[j]);
  }
  return out;
}

double spectral_norm(const Matrix& k) {
  if (k.size() == 0) return 0.0;
  const Matrix gram = k.rows() < k.cols() ? Matrix(k * k.transpose())
                                          : Matrix(k.transpose() * k);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff()));
}

CoefficientVector random_direction(Rng& rng, Eigen::Index n) {
  CoefficientVector d(n);
  do {
    for (Eigen::Index i = 0; i < n; ++i) d[i] = rng.normal();
  } while (d.norm() == 0.0);
  return d.normalized();
}

bool is_sparse(const CoefficientVector& u) {
  return support_of(u).size() < static_cast<std::size_t>(u.size());
}

// Minimizes max_i |b_i + (C z)_i| over z through a sequence of smooth
// l^p problems (p = 4 ... 256) solved by damped Newton. Returns the best
// z seen in the sup norm.
Eigen::VectorXd minimax_shift(const Matrix& c, const Eigen::VectorXd& b) {
  Eigen::VectorXd z = Eigen::VectorXd::Zero(c.cols());
  Eigen::VectorXd best = z;
  double best_sup = b.cwiseAbs().maxCoeff();
  if (c.cols() == 0 || b.size() == 0) return best;

  const auto sup_at = [&](const Eigen::VectorXd& x) { return (b + c * x).cwiseAbs().maxCoeff(); };
  for (double p = 4.0; p <= 256.0; p *= 2.0) {
    // f(z) = sum (|r_i| / scale)^p with a fixed scale keeps values finite
    const double scale = sup_at(z);
    if (scale == 0.0) return z;
    const auto f = [&](const Eigen::VectorXd& x) {
      return ((b + c * x) / scale).cwiseAbs().array().pow(p).sum();
    };
    for (int it = 0; it < 50; ++it) {
      const Eigen::VectorXd r = (b + c * z) / scale;
      const Eigen::ArrayXd a = r.cwiseAbs().array();
      const Eigen::VectorXd g = c.transpose() * (p * a.pow(p - 1.0) * r.array().sign()).matrix() / scale;
      const Eigen::VectorXd d2 = (p * (p - 1.0) * a.pow(p - 2.0)).matrix();
      Matrix h = c.transpose() * d2.asDiagonal() * c / (scale * scale);
      h.diagonal().array() += 1e-12 * (1.0 + h.diagonal().cwiseAbs().maxCoeff());
      const Eigen::VectorXd step = h.ldlt().solve(-g);
      const double f0 = f(z);
      double t = 1.0;
      bool moved = false;
      for (int k = 0; k < 40; ++k) {
        const Eigen::VectorXd trial = z + t * step;
        if (f(trial) < f0) {
          z = trial;
          moved = true;
          break;
        }
        t *= 0.5;
      }
      const double sup = sup_at(z);
      if (sup < best_sup) {
        best_sup = sup;
        best = z;
      }
      if (!moved || (t * step).norm() <= 1e-14 * (1.0 + z.norm())) break;
    }
  }
  return best;
}

}  // namespace

std::vector<Eigen::Index> support_of(const CoefficientVector& u, double tol) {
  std::vector<Eigen::Index> idx;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (std::abs(u[i]) > tol) idx.push_back(i);
  }
  return idx;
}

SourceCertificate check_source_condition(const ForwardOperator& op,
                                         const CoefficientVector& u_dagger,
                                         const PenaltySpec& spec) {
  if (static_cast<std::size_t>(u_dagger.size()) != op.cols() || spec.size() != op.cols()) {
    throw InvalidArgument("check_source_condition: dimension mismatch");
  }
  const Matrix k = op.derivative_matrix(u_dagger);
  const Matrix kt = k.transpose();
  SourceCertificate cert;

  if (spec.q() > 1.0) {
    cert.xi = subgradient_rq(u_dagger, spec);
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(kt);
    cert.omega = cod.solve(cert.xi);
    cert.residual = (kt * cert.omega - cert.xi).norm();
    cert.beta2 = cert.omega.norm();
    cert.valid = cert.residual <= kCertificateTol * (1.0 + cert.xi.norm());
    if (!cert.valid) cert.reason = "subgradient is not in the range of the adjoint";
    return cert;
  }

  // q = 1: fixed on the support, completed by the minimum-norm omega.
  const auto support = support_of(u_dagger);
  const auto& w = spec.weights();
  CoefficientVector xi_support(static_cast<Eigen::Index>(support.size()));
  for (std::size_t j = 0; j < support.size(); ++j) {
    const auto i = support[j];
    xi_support[static_cast<Eigen::Index>(j)] = u_dagger[i] > 0.0 ? w[i] : -w[i];
  }
  if (support.empty()) {
    cert.omega = DataVector::Zero(k.rows());
  } else {
    const Matrix kj_t = columns(k, support).transpose();
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(kj_t);
    cert.omega = cod.solve(xi_support);
    cert.residual = (kj_t * cert.omega - xi_support).norm();
  }
  std::vector<bool> on_support(static_cast<std::size_t>(u_dagger.size()), false);
  for (auto i : support) on_support[static_cast<std::size_t>(i)] = true;
  std::vector<Eigen::Index> off;
  for (Eigen::Index i = 0; i < u_dagger.size(); ++i) {
    if (!on_support[static_cast<std::size_t>(i)]) off.push_back(i);
  }
  const auto gap_of = [&](const DataVector& omega) {
    const CoefficientVector x = kt * omega;
    double gap = std::numeric_limits<double>::infinity();
    for (auto i : off) gap = std::min(gap, w[i] - std::abs(x[i]));
    return gap;
  };

  // When the minimum-norm completion is not strict, search the affine set
  // {omega : K_J^T omega = xi_J} for the smallest weighted sup norm off
  // the support.
  if (!support.empty() && !off.empty() && !(gap_of(cert.omega) > 0.0)) {
    const Matrix kj = columns(k, support);
    Eigen::ColPivHouseholderQR<Matrix> qr(kj);
    const Eigen::Index rank = qr.rank();
    if (rank < kj.rows()) {
      const Matrix q_full = qr.householderQ() * Matrix::Identity(kj.rows(), kj.rows());
      const Matrix null = q_full.rightCols(kj.rows() - rank);
      Matrix c(static_cast<Eigen::Index>(off.size()), null.cols());
      Eigen::VectorXd b(static_cast<Eigen::Index>(off.size()));
      const CoefficientVector x0 = kt * cert.omega;
      for (std::size_t r = 0; r < off.size(); ++r) {
        const auto i = off[r];
        c.row(static_cast<Eigen::Index>(r)) = k.col(i).transpose() * null / w[i];
        b[static_cast<Eigen::Index>(r)] = x0[i] / w[i];
      }
      const DataVector candidate = cert.omega + null * minimax_shift(c, b);
      if (gap_of(candidate) > gap_of(cert.omega)) cert.omega = candidate;
      cert.residual = (kj.transpose() * cert.omega - xi_support).norm();
    }
  }

  cert.xi = kt * cert.omega;
  for (std::size_t j = 0; j < support.size(); ++j) {
    cert.xi[support[j]] = xi_support[static_cast<Eigen::Index>(j)];
  }
  cert.beta2 = cert.omega.norm();
  for (auto i : off) cert.off_support_gap = std::min(cert.off_support_gap, w[i] - std::abs(cert.xi[i]));

  const bool residual_ok = cert.residual <= kCertificateTol * (1.0 + xi_support.norm());
  const bool bounded = cert.off_support_gap >= -kCertificateTol;
  cert.valid = residual_ok && bounded;
  if (!residual_ok) {
    cert.reason = "support signs are not reachable by the adjoint";
  } else if (!bounded) {
    cert.reason = "no completion within the weights off the support";
  }
  return cert;
}

FbiReport fbi_check(const ForwardOperator& op, const CoefficientVector& u_dagger) {
  FbiReport report;
  report.support = support_of(u_dagger);
  if (report.support.empty()) {
    report.empty_support = true;
    report.sigma_min = std::numeric_limits<double>::infinity();
    report.injectivity_constant = 0.0;
    return report;
  }
  const Matrix sub = columns(op.derivative_matrix(u_dagger), report.support);
  if (sub.cols() > sub.rows()) {
    report.sigma_min = 0.0;
  } else {
    Eigen::JacobiSVD<Matrix> svd(sub);
    report.sigma_min = svd.singularValues().minCoeff();
  }
  report.injectivity_constant = report.sigma_min > 0.0
                                    ? 1.0 / report.sigma_min
                                    : std::numeric_limits<double>::infinity();
  return report;
}

RateConstants certify_rate_constants(const ForwardOperator& op,
                                     const CoefficientVector& u_dagger,
                                     const PenaltySpec& spec, RateRoute route) {
  RateConstants c;
  c.route = route;
  const SourceCertificate cert = check_source_condition(op, u_dagger, spec);
  if (!cert.valid) {
    c.note = "source condition fails: " + cert.reason;
    return c;
  }
  const double q = spec.q();
  const double r_dagger = eval_rq(u_dagger, spec);

  if (route == RateRoute::SourceCondition) {
    if (q <= 1.0) {
      c.note = "source-condition route needs q > 1";
      return c;
    }
    c.r = 2.0;
    c.beta1 = bregman_constant(spec) / (4.0 * spec.w_min() + 3.0 * r_dagger);
    c.beta2 = cert.beta2;
    c.rho = r_dagger + spec.w_min();
    c.sigma = std::numeric_limits<double>::infinity();
    c.certified = true;
    return c;
  }

  const FbiReport fbi = fbi_check(op, u_dagger);
  if (!fbi.injective()) {
    c.note = "derivative is not injective on the support";
    return c;
  }
  const double inj = fbi.empty_support ? 0.0 : fbi.injectivity_constant;
  const double k_norm = spectral_norm(op.derivative_matrix(u_dagger));

  // Off-support coefficients are controlled by the Bregman distance with
  // factor 1/gap; for q = 1 the gap is min (w_i - |xi_i|) off the support.
  double gap = spec.w_min();
  if (q == 1.0) {
    gap = cert.off_support_gap;
    if (!(gap > 0.0)) {
      c.note = "subgradient certificate is not strict off the support";
      return c;
    }
  }
  c.r = q;
  c.sigma = q > 1.0 ? 1.0 : std::numeric_limits<double>::infinity();
  c.rho = std::numeric_limits<double>::infinity();
  const double spread = std::pow(2.0, q - 1.0);
  const double a = spread * std::pow(1.0 + inj * k_norm, q) / gap;
  const double data_term = spread * std::pow(inj, q) *
                           (q > 1.0 ? std::pow(c.sigma, q - 1.0) : 1.0);
  c.beta1 = 1.0 / a;
  c.beta2 = data_term / a + cert.beta2;
  c.certified = true;
  return c;
}

void validate_rate_constants(const ForwardOperator& op,
                             const CoefficientVector& u_dagger,
                             const PenaltySpec& spec, RateConstants& c,
                             int n_samples, double radius, std::uint64_t seed) {
  c.samples_checked = 0;
  c.samples_skipped = 0;
  c.violations = 0;
  c.violating_samples.clear();
  c.worst_slack = std::numeric_limits<double>::infinity();
  c.validated = false;
  if (!c.certified) return;

  const double r_dagger = eval_rq(u_dagger, spec);
  const DataVector f_dagger = op.apply(u_dagger);
  for (int s = 0; s < n_samples; ++s) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(s)));
    const CoefficientVector h = radius * random_direction(rng, u_dagger.size());
    const CoefficientVector u = u_dagger + h;
    const double r_u = eval_rq(u, spec);
    const double misfit = (op.apply(u) - f_dagger).norm();
    if (!(r_u < c.rho) || !(misfit < c.sigma)) {
      ++c.samples_skipped;
      continue;
    }
    ++c.samples_checked;
    const double slack = (r_u - r_dagger) - c.beta1 * std::pow(h.norm(), c.r) + c.beta2 * misfit;
    c.worst_slack = std::min(c.worst_slack, slack);
    if (slack < kSampleSlack) {
      ++c.violations;
      if (c.violating_samples.size() < kMaxReportedViolations) c.violating_samples.push_back(s);
    }
  }
  c.validated = c.violations == 0 && c.samples_checked > 0;
}

RateConstants estimate_rate_constants(const ForwardOperator& op,
                                      const CoefficientVector& u_dagger,
                                      const PenaltySpec& spec, double r,
                                      int n_samples, double radius,
                                      std::uint64_t seed) {
  if (n_samples < 100) throw InvalidArgument("estimate_rate_constants needs n_samples >= 100");
  RateRoute route;
  if (r == spec.q() && is_sparse(u_dagger)) {
    route = RateRoute::Sparse;
  } else if (r == 2.0) {
    route = RateRoute::SourceCondition;
  } else {
    throw InvalidArgument("exponent r must equal q (sparse u+) or 2");
  }
  RateConstants c = certify_rate_constants(op, u_dagger, spec, route);
  validate_rate_constants(op, u_dagger, spec, c, n_samples, radius, seed);
  return c;
}

ErrorBounds theoretical_bound(const RateConstants& c, int p, double alpha, double delta) {
  if (p != 1 && p != 2) throw InvalidArgument("theoretical_bound supports p = 1 and p = 2");
  if (!(alpha > 0.0)) throw InvalidArgument("alpha must be positive");
  if (!(delta >= 0.0)) throw InvalidArgument("delta must be nonnegative");
  if (!(c.beta1 > 0.0)) throw InvalidArgument("beta1 must be positive");
  const double ab = alpha * c.beta2;
  ErrorBounds out;
  if (p == 1) {
    if (!(ab < 1.0)) throw InvalidArgument("bound inapplicable: alpha * beta2 >= 1 for p = 1");
    out.err_bound = std::pow((1.0 + ab) * delta / (alpha * c.beta1), 1.0 / c.r);
    out.residual_bound = (1.0 + ab) * delta / (1.0 - ab);
    return out;
  }
  // p = 2, conjugate exponent p* = 2
  const double conj = 2.0;
  const double err_rhs = (delta * delta + ab * delta + std::pow(ab, conj) / conj) / (alpha * c.beta1);
  const double res_rhs = conj * delta * delta + conj * ab * delta + std::pow(ab, conj);
  out.err_bound = std::pow(err_rhs, 1.0 / c.r);
  out.residual_bound = std::sqrt(res_rhs);
  return out;
}

SparseRateReport check_sparse_rate_conditions(const OperatorPtr& op,
                                              const CoefficientVector& u_dagger,
                                              const PenaltySpec& spec,
                                              int n_samples, double radius,
                                              std::uint64_t seed) {
  SparseRateReport report;
  report.linear = op->is_linear();
  if (!is_sparse(u_dagger)) report.failures.push_back("u+ is not sparse");

  report.fbi = fbi_check(*op, u_dagger);
  if (!report.fbi.injective()) report.failures.push_back("finite basis injectivity fails");

  report.source = check_source_condition(*op, u_dagger, spec);
  if (!report.source.valid) {
    report.failures.push_back("range condition fails: " + report.source.reason);
  }

  const double r_dagger = eval_rq(u_dagger, spec);
  const DataVector f_dagger = op->apply(u_dagger);

  if (report.linear && spec.q() == 1.0 && report.source.valid) {
    report.gamma3 = 0.5;
    report.gamma2_certified = 3.0 * report.source.beta2;
    for (int s = 0; s < n_samples; ++s) {
      Rng rng(derive_seed(seed, static_cast<std::uint64_t>(s)));
      const CoefficientVector h = radius * random_direction(rng, u_dagger.size());
      const double lhs = eval_rq(u_dagger + h, spec) - r_dagger;
      const double misfit = op->derivative_apply(u_dagger, h).norm();
      const double need = -report.gamma3 * report.source.xi.dot(h) - lhs;
      ++report.samples;
      if (need > 0.0) {
        report.gamma2_sampled = std::max(report.gamma2_sampled,
                                         misfit > 0.0 ? need / misfit
                                                      : std::numeric_limits<double>::infinity());
      }
      if (lhs + report.gamma3 * report.source.xi.dot(h) + report.gamma2_certified * misfit <
          kSampleSlack) {
        ++report.violations;
      }
    }
    if (report.violations > 0) report.failures.push_back("q = 1 subgradient inequality violated");
  }

  if (!report.linear) {
    // Fix gamma1 = 1 and fit the smallest gamma2 consistent with the samples.
    report.gamma1 = 1.0;
    for (int s = 0; s < n_samples; ++s) {
      Rng rng(derive_seed(seed, static_cast<std::uint64_t>(s)));
      const CoefficientVector h = radius * random_direction(rng, u_dagger.size());
      const DataVector fu = op->apply(u_dagger + h);
      const double lhs = eval_rq(u_dagger + h, spec) - r_dagger;
      const double remainder = (fu - f_dagger - op->derivative_apply(u_dagger, h)).norm();
      const double misfit = (fu - f_dagger).norm();
      const double need = report.gamma1 * remainder - lhs;
      ++report.samples;
      if (need > 0.0) {
        if (misfit > 0.0) {
          report.gamma2 = std::max(report.gamma2, need / misfit);
        } else {
          report.gamma2 = std::numeric_limits<double>::infinity();
          ++report.violations;
        }
      }
    }
    if (!std::isfinite(report.gamma2)) {
      report.failures.push_back("nonlinearity condition admits no finite gamma2");
    }
  }

  report.passed = report.failures.empty();
  return report;
}

}  // namespace sparsereg
