#pragma once

#include "sparsereg/analysis.hpp"
#include "sparsereg/operators.hpp"
#include "sparsereg/penalty.hpp"
#include "sparsereg/rate_fit.hpp"
#include "sparsereg/solver.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sparsereg {

enum class ProblemKind { Diagonal, Convolution, RandomDense, ToyNonlinear };

std::string to_string(ProblemKind kind);
/// Accepts "diagonal", "convolution", "random-dense", "toy-nonlinear".
ProblemKind parse_problem_kind(std::string_view text);

/// How the true solution is drawn.
enum class TruthModel {
  Sparse,  // `sparsity` nonzeros, values uniform in +-[0.5, 1.5]
  Range,   // u+ from a random source element: xi = F^* omega, q > 1
};

std::string to_string(TruthModel model);
TruthModel parse_truth_model(std::string_view text);

struct ProblemOptions {
  ProblemKind kind = ProblemKind::Diagonal;
  TruthModel truth = TruthModel::Sparse;
  std::size_t n = 64;
  std::size_t m = 64;       // ignored for square kinds
  std::size_t sparsity = 3;
  double q = 1.0;
  int p = 2;
  std::optional<Eigen::VectorXd> weights;  // uniform `weight` if absent
  double weight = 1.0;
  double decay = 1.0;          // diagonal: s_i = (i+1)^{-decay}
  double kernel_width = 3.0;   // convolution
  double epsilon = 1e-3;       // toy-nonlinear
  std::uint64_t seed = 0;
};

struct ProblemInstance {
  OperatorPtr op;
  CoefficientVector u_dagger;
  DataVector clean_data;
  PenaltySpec spec;
  int p = 2;
  std::size_t sparsity = 0;
  std::uint64_t seed = 0;
  int attempts = 1;
  SourceCertificate source;
  FbiReport fbi;
};

/// One draw (attempt index `attempt`) with its condition reports but
/// without rejecting failures.
ProblemInstance build_problem(const ProblemOptions& options, int attempt = 0);

/// Builds an instance that passes fbi_check and check_source_condition,
/// redrawing up to 10 times. Throws NumericalError when every draw fails.
ProblemInstance generate_problem(const ProblemOptions& options);

/// v^delta = v + delta * g / |g| with g standard normal; |v^delta - v| = delta.
DataVector add_noise(const DataVector& clean, double delta, std::uint64_t seed);

/// c * delta^{p-1}
double alpha_rule(double delta, int p, double c);

/// `count` logarithmically spaced values from delta_max down to delta_min.
std::vector<double> log_delta_grid(double delta_min, double delta_max, int count);

struct SweepOptions {
  std::vector<double> deltas;   // strictly decreasing, positive
  double c_alpha = 1.0;
  int trials = 5;
  std::uint64_t seed = 0;
  SolverConfig solver;          // p and alpha are set per cell
  int threads = 1;
  bool compute_bounds = true;
  int validation_samples = 1000;
  double validation_radius = 0.1;
};

struct SweepRow {
  int delta_index = 0;
  double delta = 0.0;
  double alpha = 0.0;
  int trial = 0;
  double error_norm = 0.0;
  double residual_norm = 0.0;
  double err_bound = 0.0;        // NaN when no certified constants
  double residual_bound = 0.0;
  int iterations = 0;
  bool converged = false;
  double last_step = 0.0;
  double data_misfit = 0.0;      // |F(u) - F(u+)|
  double penalty_value = 0.0;
  bool in_region = false;        // minimizer inside the constants' validity region
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<double> deltas;
  std::vector<double> mean_errors;
  std::vector<bool> used_in_fit;
  std::optional<RateEstimate> rate;
  std::string fit_error;                 // why `rate` is empty
  std::optional<RateConstants> constants;
  bool all_converged = true;
};

SweepResult run_sweep(const ProblemInstance& instance, const SweepOptions& options);

/// Exact header: delta,alpha,trial,error_norm,residual_norm,err_bound,
/// residual_bound,iterations,converged
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
inline constexpr std::string_view kSweepCsvHeader =
    "delta,alpha,trial,error_norm,residual_norm,err_bound,residual_bound,iterations,converged";

enum class RecoveryStatus { Pass, Fail, Inapplicable };
std::string to_string(RecoveryStatus status);

struct ExactRecoveryReport {
  RecoveryStatus status = RecoveryStatus::Inapplicable;
  double error = 0.0;
  double tolerance = 0.0;
  double alpha = 0.0;
  double beta2 = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Noise-free p = 1 solve; passes iff |u_alpha - u+| <= 1e-6 (1 + |u+|).
/// Inapplicable when alpha * beta2 >= 1 for the instance certificate.
ExactRecoveryReport exact_recovery_test(const ProblemInstance& instance, double alpha);

}  // namespace sparsereg
