#include "sparsereg/experiments.hpp"

#include "sparsereg/random.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <thread>

namespace sparsereg {

namespace {

constexpr int kMaxAttempts = 10;

Matrix gaussian_matrix(Rng& rng, std::size_t rows, std::size_t cols) {
  Matrix a(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  const double scale = 1.0 / std::sqrt(static_cast<double>(rows));
  // Column-major fill order is part of the reproducibility contract.
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) a(i, j) = scale * rng.normal();
  }
  return a;
}

OperatorPtr build_operator(const ProblemOptions& o, Rng& rng) {
  switch (o.kind) {
    case ProblemKind::Diagonal: {
      Eigen::VectorXd s(static_cast<Eigen::Index>(o.n));
      for (Eigen::Index i = 0; i < s.size(); ++i) {
        s[i] = std::pow(static_cast<double>(i + 1), -o.decay);
      }
      return make_diagonal_linear(std::move(s));
    }
    case ProblemKind::Convolution:
      return make_convolution_linear(gaussian_kernel(o.kernel_width), o.n);
    case ProblemKind::RandomDense:
      return make_dense_linear(gaussian_matrix(rng, o.m, o.n));
    case ProblemKind::ToyNonlinear: {
      Matrix a = gaussian_matrix(rng, o.m, o.n);
      Matrix b = gaussian_matrix(rng, o.m, o.n);
      return make_toy_nonlinear(std::move(a), std::move(b), o.epsilon);
    }
  }
  throw InvalidArgument("unknown problem kind");
}

CoefficientVector draw_sparse(Rng& rng, std::size_t n, std::size_t k) {
  std::vector<Eigen::Index> idx(n);
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  // partial Fisher-Yates
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(idx[i], idx[j]);
  }
  CoefficientVector u = CoefficientVector::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < k; ++i) {
    const double magnitude = rng.uniform(0.5, 1.5);
    u[idx[i]] = rng.coin() ? magnitude : -magnitude;
  }
  return u;
}

// Inverts the gradient formula xi_i = q w_i |u_i|^{q-1} sgn(u_i).
CoefficientVector draw_from_range(Rng& rng, const ForwardOperator& op, const PenaltySpec& spec) {
  DataVector omega(static_cast<Eigen::Index>(op.rows()));
  for (Eigen::Index i = 0; i < omega.size(); ++i) omega[i] = rng.normal();
  const CoefficientVector origin = CoefficientVector::Zero(static_cast<Eigen::Index>(op.cols()));
  const CoefficientVector xi = op.derivative_adjoint_apply(origin, omega);
  const double q = spec.q();
  CoefficientVector u(xi.size());
  for (Eigen::Index i = 0; i < xi.size(); ++i) {
    const double mag = std::pow(std::abs(xi[i]) / (q * spec.weights()[i]), 1.0 / (q - 1.0));
    u[i] = xi[i] > 0.0 ? mag : (xi[i] < 0.0 ? -mag : 0.0);
  }
  return u;
}

void validate_options(const ProblemOptions& o) {
  if (o.n == 0) throw InvalidArgument("problem size n must be positive");
  if (o.sparsity > o.n) throw InvalidArgument("sparsity exceeds n");
  if (o.p != 1 && o.p != 2) throw InvalidArgument("p must be 1 or 2");
  if (!(o.q >= 1.0 && o.q <= 2.0)) throw InvalidArgument("q must lie in [1, 2]");
  if ((o.kind == ProblemKind::RandomDense || o.kind == ProblemKind::ToyNonlinear) && o.m == 0) {
    throw InvalidArgument("problem rows m must be positive");
  }
  if (o.kind == ProblemKind::ToyNonlinear && o.p != 2) {
    throw InvalidArgument("toy-nonlinear problems support p = 2 only");
  }
  if (o.truth == TruthModel::Range && o.q <= 1.0) {
    throw InvalidArgument("range-condition truth needs q > 1");
  }
  if (o.truth == TruthModel::Range && o.kind == ProblemKind::ToyNonlinear) {
    throw InvalidArgument("range-condition truth needs a linear operator");
  }
  if (o.weights && static_cast<std::size_t>(o.weights->size()) != o.n) {
    throw InvalidArgument("explicit weights must have length n");
  }
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::string to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::Diagonal: return "diagonal";
    case ProblemKind::Convolution: return "convolution";
    case ProblemKind::RandomDense: return "random-dense";
    case ProblemKind::ToyNonlinear: return "toy-nonlinear";
  }
  return "unknown";
}

ProblemKind parse_problem_kind(std::string_view text) {
  if (text == "diagonal") return ProblemKind::Diagonal;
  if (text == "convolution") return ProblemKind::Convolution;
  if (text == "random-dense") return ProblemKind::RandomDense;
  if (text == "toy-nonlinear") return ProblemKind::ToyNonlinear;
  throw InvalidArgument("unknown problem kind '" + std::string(text) + "'");
}

std::string to_string(TruthModel model) {
  return model == TruthModel::Sparse ? "sparse" : "range";
}

TruthModel parse_truth_model(std::string_view text) {
  if (text == "sparse") return TruthModel::Sparse;
  if (text == "range") return TruthModel::Range;
  throw InvalidArgument("unknown truth model '" + std::string(text) + "'");
}

ProblemInstance build_problem(const ProblemOptions& options, int attempt) {
  validate_options(options);
  if (attempt < 0) throw InvalidArgument("attempt index must be nonnegative");
  ProblemOptions o = options;
  if (o.kind == ProblemKind::Diagonal || o.kind == ProblemKind::Convolution) o.m = o.n;

  const PenaltySpec spec = o.weights ? PenaltySpec(o.q, *o.weights)
                                     : PenaltySpec::uniform(o.q, o.n, o.weight);
  Rng rng(derive_seed(o.seed, static_cast<std::uint64_t>(attempt)));
  OperatorPtr op = build_operator(o, rng);
  CoefficientVector u = o.truth == TruthModel::Sparse ? draw_sparse(rng, o.n, o.sparsity)
                                                      : draw_from_range(rng, *op, spec);
  FbiReport fbi = fbi_check(*op, u);
  SourceCertificate source = check_source_condition(*op, u, spec);
  DataVector clean = op->apply(u);
  const std::size_t nnz = support_of(u).size();
  return ProblemInstance{
      .op = std::move(op),
      .u_dagger = std::move(u),
      .clean_data = std::move(clean),
      .spec = spec,
      .p = o.p,
      .sparsity = nnz,
      .seed = o.seed,
      .attempts = attempt + 1,
      .source = std::move(source),
      .fbi = std::move(fbi),
  };
}

ProblemInstance generate_problem(const ProblemOptions& options) {
  std::string last_failure;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    ProblemInstance inst = build_problem(options, attempt);
    if (!inst.fbi.injective()) {
      last_failure = "finite basis injectivity fails";
      continue;
    }
    if (!inst.source.valid) {
      last_failure = "source condition fails: " + inst.source.reason;
      continue;
    }
    return inst;
  }
  throw NumericalError("no suitable " + to_string(options.kind) + " instance after " +
                       std::to_string(kMaxAttempts) + " draws (" + last_failure + ")");
}

DataVector add_noise(const DataVector& clean, double delta, std::uint64_t seed) {
  if (!(delta >= 0.0)) throw InvalidArgument("noise level must be nonnegative");
  if (delta == 0.0) return clean;
  Rng rng(seed);
  DataVector g(clean.size());
  do {
    for (Eigen::Index i = 0; i < g.size(); ++i) g[i] = rng.normal();
  } while (g.norm() == 0.0);
  return clean + (delta / g.norm()) * g;
}

double alpha_rule(double delta, int p, double c) {
  if (!(delta > 0.0)) throw InvalidArgument("alpha rule needs delta > 0");
  if (!(c > 0.0)) throw InvalidArgument("alpha rule needs c > 0");
  if (p == 1) return c;
  return c * std::pow(delta, p - 1);
}

std::vector<double> log_delta_grid(double delta_min, double delta_max, int count) {
  if (count < 1) throw InvalidArgument("delta grid needs at least one point");
  if (!(delta_min > 0.0) || !(delta_max >= delta_min)) {
    throw InvalidArgument("delta grid needs 0 < delta_min <= delta_max");
  }
  std::vector<double> grid(static_cast<std::size_t>(count));
  if (count == 1) {
    grid[0] = delta_max;
    return grid;
  }
  const double lo = std::log10(delta_min);
  const double hi = std::log10(delta_max);
  for (int i = 0; i < count; ++i) {
    grid[static_cast<std::size_t>(i)] = std::pow(10.0, hi + (lo - hi) * i / (count - 1));
  }
  return grid;
}

SweepResult run_sweep(const ProblemInstance& inst, const SweepOptions& opt) {
  if (opt.deltas.empty()) throw InvalidArgument("sweep needs at least one delta");
  for (std::size_t i = 0; i < opt.deltas.size(); ++i) {
    if (!(opt.deltas[i] > 0.0)) throw InvalidArgument("sweep deltas must be positive");
    if (i > 0 && !(opt.deltas[i] < opt.deltas[i - 1])) {
      throw InvalidArgument("sweep deltas must be strictly decreasing");
    }
  }
  if (opt.deltas.front() / opt.deltas.back() < 100.0 * (1.0 - 1e-12)) {
    throw InvalidArgument("sweep deltas must span at least two decades");
  }
  if (opt.trials < 1) throw InvalidArgument("trials per delta must be >= 1");

  SweepResult result;
  result.deltas = opt.deltas;

  if (opt.compute_bounds) {
    const bool sparse = inst.sparsity < static_cast<std::size_t>(inst.u_dagger.size());
    const double q = inst.spec.q();
    if (sparse || q > 1.0) {
      try {
        result.constants = estimate_rate_constants(*inst.op, inst.u_dagger, inst.spec,
                                                   sparse ? q : 2.0, opt.validation_samples,
                                                   opt.validation_radius, inst.seed);
      } catch (const InvalidArgument&) {
        result.constants.reset();
      }
    }
  }
  const RateConstants* constants =
      result.constants && result.constants->certified ? &*result.constants : nullptr;

  const std::size_t n_cells = opt.deltas.size() * static_cast<std::size_t>(opt.trials);
  result.rows.resize(n_cells);
  const double nan = std::numeric_limits<double>::quiet_NaN();

  const auto run_cell = [&](std::size_t cell) {
    const int k = static_cast<int>(cell / static_cast<std::size_t>(opt.trials));
    const int t = static_cast<int>(cell % static_cast<std::size_t>(opt.trials));
    const double delta = opt.deltas[static_cast<std::size_t>(k)];
    const DataVector noisy = add_noise(
        inst.clean_data, delta,
        derive_seed(opt.seed, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(t)));

    SolverConfig cfg = opt.solver;
    cfg.p = inst.p;
    cfg.alpha = alpha_rule(delta, inst.p, opt.c_alpha);
    cfg.tol = std::min(cfg.tol, 1e-4 * delta);
    const SolveReport rep = solve(inst.op, noisy, inst.spec, cfg);

    SweepRow row;
    row.delta_index = k;
    row.delta = delta;
    row.alpha = cfg.alpha;
    row.trial = t;
    row.error_norm = (rep.minimizer - inst.u_dagger).norm();
    row.residual_norm = rep.residual_norm;
    row.iterations = rep.iterations;
    row.converged = rep.converged;
    row.last_step = rep.last_step;
    row.penalty_value = rep.penalty_value;
    row.data_misfit = (inst.op->apply(rep.minimizer) - inst.clean_data).norm();
    row.err_bound = nan;
    row.residual_bound = nan;
    if (constants != nullptr && !(inst.p == 1 && cfg.alpha * constants->beta2 >= 1.0)) {
      const ErrorBounds b = theoretical_bound(*constants, inst.p, cfg.alpha, delta);
      row.err_bound = b.err_bound;
      row.residual_bound = b.residual_bound;
      row.in_region = row.penalty_value < constants->rho && row.data_misfit < constants->sigma;
    }
    result.rows[cell] = row;
  };

  const int threads = std::max(1, std::min<int>(opt.threads, static_cast<int>(n_cells)));
  if (threads == 1) {
    for (std::size_t c = 0; c < n_cells; ++c) run_cell(c);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (int i = 0; i < threads; ++i) {
      pool.emplace_back([&] {
        for (std::size_t c = next++; c < n_cells; c = next++) run_cell(c);
      });
    }
  }

  std::vector<double> fit_deltas;
  std::vector<double> fit_errors;
  for (std::size_t k = 0; k < opt.deltas.size(); ++k) {
    double err = 0.0;
    double step = 0.0;
    bool converged = true;
    for (int t = 0; t < opt.trials; ++t) {
      const SweepRow& row = result.rows[k * static_cast<std::size_t>(opt.trials) +
                                        static_cast<std::size_t>(t)];
      err += row.error_norm;
      step += row.last_step;
      converged = converged && row.converged;
    }
    err /= opt.trials;
    step /= opt.trials;
    result.all_converged = result.all_converged && converged;
    result.mean_errors.push_back(err);
    // Solver-floor guard: the optimization error must be negligible
    // against the measured regularization error.
    const bool usable = converged && err > 0.0 && step <= 0.01 * err;
    result.used_in_fit.push_back(usable);
    if (usable) {
      fit_deltas.push_back(opt.deltas[k]);
      fit_errors.push_back(err);
    }
  }
  if (fit_deltas.size() >= 4) {
    result.rate = fit_rate(fit_deltas, fit_errors);
  } else {
    result.fit_error = "only " + std::to_string(fit_deltas.size()) +
                       " valid noise levels; the rate fit needs 4";
  }
  return result;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kSweepCsvHeader << '\n';
  for (const SweepRow& r : rows) {
    out << format_double(r.delta) << ',' << format_double(r.alpha) << ',' << r.trial << ','
        << format_double(r.error_norm) << ',' << format_double(r.residual_norm) << ','
        << format_double(r.err_bound) << ',' << format_double(r.residual_bound) << ','
        << r.iterations << ',' << (r.converged ? 1 : 0) << '\n';
  }
}

std::string to_string(RecoveryStatus status) {
  switch (status) {
    case RecoveryStatus::Pass: return "pass";
    case RecoveryStatus::Fail: return "fail";
    case RecoveryStatus::Inapplicable: return "inapplicable";
  }
  return "unknown";
}

ExactRecoveryReport exact_recovery_test(const ProblemInstance& inst, double alpha) {
  if (inst.p != 1) throw InvalidArgument("exact recovery test needs a p = 1 instance");
  if (!(alpha > 0.0)) throw InvalidArgument("alpha must be positive");
  ExactRecoveryReport rep;
  rep.alpha = alpha;
  rep.beta2 = inst.source.beta2;
  rep.tolerance = 1e-6 * (1.0 + inst.u_dagger.norm());
  if (!inst.source.valid || alpha * inst.source.beta2 >= 1.0) {
    rep.status = RecoveryStatus::Inapplicable;
    return rep;
  }
  SolverConfig cfg;
  cfg.p = 1;
  cfg.alpha = alpha;
  cfg.max_iter = 500000;
  cfg.tol = 1e-13;
  const SolveReport s = solve(inst.op, inst.clean_data, inst.spec, cfg);
  rep.error = (s.minimizer - inst.u_dagger).norm();
  rep.iterations = s.iterations;
  rep.converged = s.converged;
  rep.status = rep.error <= rep.tolerance ? RecoveryStatus::Pass : RecoveryStatus::Fail;
  return rep;
}

}  // namespace sparsereg
