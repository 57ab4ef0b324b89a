#pragma once

#include "sparsereg/operators.hpp"
#include "sparsereg/penalty.hpp"

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace sparsereg {

inline constexpr double kSupportTol = 1e-12;

/// Indices i with |u_i| > tol.
std::vector<Eigen::Index> support_of(const CoefficientVector& u, double tol = kSupportTol);

/// Range-condition certificate: xi in dR_q(u+) with F'(u+)^* omega = xi.
struct SourceCertificate {
  bool valid = false;
  std::string reason;        // empty when valid
  CoefficientVector xi;
  DataVector omega;
  double residual = 0.0;     // |F'(u+)^* omega - xi| (support coordinates for q = 1)
  double beta2 = 0.0;        // |omega|
  // q = 1 only: smallest gap w_i - |xi_i| off the support (> 0 means strict).
  double off_support_gap = std::numeric_limits<double>::infinity();
};

/// For q > 1, xi is the gradient of R_q at u+. For q = 1, xi is fixed to
/// w_i sgn(u+_i) on the support and completed off the support by the
/// minimum-norm omega; when that completion is not strictly inside the
/// weights, omega is re-chosen among all solutions to minimize
/// max |xi_i| / w_i off the support. omega solves the least-squares problem
/// min |F'(u+)^* omega - xi|; the certificate is valid when the residual is
/// at most 1e-8 (1 + |xi|) and xi is a subgradient.
SourceCertificate check_source_condition(const ForwardOperator& op,
                                         const CoefficientVector& u_dagger,
                                         const PenaltySpec& spec);

struct FbiReport {
  std::vector<Eigen::Index> support;
  double sigma_min = 0.0;                 // +inf for an empty support
  double injectivity_constant = 0.0;      // 1 / sigma_min
  bool empty_support = false;
  bool injective() const { return sigma_min > 0.0; }
};

/// Smallest singular value of F'(u+) restricted to the support of u+.
FbiReport fbi_check(const ForwardOperator& op, const CoefficientVector& u_dagger);

enum class RateRoute {
  SourceCondition,  // r = 2 from the Bregman lower bound, q > 1
  Sparse,           // r = q from finite basis injectivity
};

/// Constants of the variational inequality
///   R(u) - R(u+) >= beta1 |u - u+|^r - beta2 |F(u) - F(u+)|
/// valid for R(u) < rho and |F(u) - F(u+)| < sigma.
struct RateConstants {
  bool certified = false;
  std::string note;
  RateRoute route = RateRoute::SourceCondition;
  double beta1 = 0.0;
  double beta2 = 0.0;
  double r = 2.0;
  double rho = std::numeric_limits<double>::infinity();
  double sigma = std::numeric_limits<double>::infinity();

  // Filled by validate_rate_constants.
  bool validated = false;
  int samples_checked = 0;
  int samples_skipped = 0;  // outside the validity region
  int violations = 0;
  double worst_slack = std::numeric_limits<double>::infinity();
  std::vector<int> violating_samples;  // first few indices
};

/// Constants derived in closed form from the certificates at u+.
/// Source route: beta1 = c_q / (4 w_min + 3 R(u+)), beta2 = |omega|,
/// rho = R(u+) + w_min. Sparse route: beta1, beta2 follow from the
/// injectivity constant on the support, |F'(u+)| and |omega|, with the
/// region |F(u) - F(u+)| < sigma (sigma = 1 for q > 1, unbounded for q = 1).
RateConstants certify_rate_constants(const ForwardOperator& op,
                                     const CoefficientVector& u_dagger,
                                     const PenaltySpec& spec, RateRoute route);

/// Samples u = u+ + radius * d with random unit directions d and checks the
/// inequality with slack >= -1e-9. Samples outside the region are skipped.
void validate_rate_constants(const ForwardOperator& op,
                             const CoefficientVector& u_dagger,
                             const PenaltySpec& spec, RateConstants& constants,
                             int n_samples, double radius, std::uint64_t seed);

/// Route selection by exponent: r == q on a sparse u+ selects the sparse
/// route, r == 2 otherwise the source-condition route.
RateConstants estimate_rate_constants(const ForwardOperator& op,
                                      const CoefficientVector& u_dagger,
                                      const PenaltySpec& spec, double r,
                                      int n_samples, double radius,
                                      std::uint64_t seed);

struct ErrorBounds {
  double err_bound = 0.0;       // bound on |u - u+|
  double residual_bound = 0.0;  // bound on |F(u) - v^delta|
};

/// Right-hand sides of the a-priori estimates, as bounds on the norms
/// themselves: the error bound is raised to 1/r and the residual bound to 1/p.
/// p = 1 requires alpha * beta2 < 1.
ErrorBounds theoretical_bound(const RateConstants& constants, int p, double alpha,
                              double delta);

struct SparseRateReport {
  bool passed = false;
  bool linear = true;
  std::vector<std::string> failures;
  SourceCertificate source;
  FbiReport fbi;

  // q = 1: sampled check of R(u) - R(u+) >= -gamma3 <xi, u-u+> - gamma2 |F(u)-F(u+)|.
  double gamma3 = 0.0;
  double gamma2_certified = 0.0;  // 3 |omega|
  double gamma2_sampled = 0.0;    // smallest gamma2 consistent with the samples

  // nonlinear: R(u) - R(u+) >= gamma1 |F(u)-F(u+)-F'(u+)(u-u+)| - gamma2 |F(u)-F(u+)|
  double gamma1 = 0.0;
  double gamma2 = 0.0;

  int samples = 0;
  int violations = 0;
};

SparseRateReport check_sparse_rate_conditions(const OperatorPtr& op,
                                              const CoefficientVector& u_dagger,
                                              const PenaltySpec& spec,
                                              int n_samples = 1000,
                                              double radius = 0.1,
                                              std::uint64_t seed = 0);

}  // namespace sparsereg
