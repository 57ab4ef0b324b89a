#include "commands.hpp"

#include "config.hpp"
#include "svg.hpp"

#include "sparsereg/json_report.hpp"
#include "sparsereg/random.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

namespace sparsereg::cli {

namespace {

using nlohmann::json;

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct Loaded {
  ExperimentConfig config;
  std::filesystem::path out_dir;
};

Loaded load(const CommandOptions& options) {
  Loaded l{load_config(options.config), {}};
  if (options.seed) l.config.seed = *options.seed;
  l.config.threads = resolve_threads(options.threads, l.config.threads);
  l.out_dir = options.out ? *options.out : std::filesystem::path(l.config.output);
  std::filesystem::create_directories(l.out_dir);
  return l;
}

json config_json(const ExperimentConfig& c) {
  return {
      {"kind", to_string(c.kind)},
      {"truth", to_string(c.truth)},
      {"n", c.n},
      {"m", c.m},
      {"sparsity", c.sparsity},
      {"q", c.q},
      {"p", c.p},
      {"seed", c.seed},
  };
}

json instance_json(const ProblemInstance& inst) {
  return {
      {"attempts", inst.attempts},
      {"sparsity", inst.sparsity},
      {"u_dagger_norm", inst.u_dagger.norm()},
      {"penalty_value", eval_rq(inst.u_dagger, inst.spec)},
  };
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

template <class Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InvalidArgument& e) {
    err << "invalid setting: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "i/o error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace

int resolve_threads(std::optional<int> flag, int config_value) {
  if (flag) {
    if (*flag < 1) throw ConfigError(0, "--threads", "must be at least 1");
    return *flag;
  }
  if (const char* env = std::getenv("SPARSEREG_THREADS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1) throw ConfigError(0, "SPARSEREG_THREADS", "must be a positive integer");
    return static_cast<int>(v);
  }
  return config_value;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::filesystem::filesystem_error("cannot open for writing", tmp, std::make_error_code(std::errc::io_error));
    out << content;
    out.flush();
    if (!out) throw std::filesystem::filesystem_error("write failed", tmp, std::make_error_code(std::errc::io_error));
  }
  std::filesystem::rename(tmp, path);
}

int cmd_solve(const CommandOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Loaded l = load(options);
    const ExperimentConfig& c = l.config;
    const double delta = options.delta.value_or(0.0);
    if (!(delta >= 0.0)) throw ConfigError(0, "--delta", "must be nonnegative");
    double alpha = 0.0;
    if (c.alpha) {
      alpha = *c.alpha;
    } else if (c.p == 1) {
      alpha = c.c_alpha;
    } else if (delta > 0.0) {
      alpha = alpha_rule(delta, c.p, c.c_alpha);
    } else {
      throw ConfigError(0, "solve.alpha", "required for a noise-free p = 2 solve");
    }

    const ProblemInstance inst = generate_problem(c.problem_options());
    const DataVector data = add_noise(inst.clean_data, delta, derive_seed(c.seed, 0, 0));
    SolverConfig scfg = c.solver_config();
    scfg.alpha = alpha;
    if (delta > 0.0) scfg.tol = std::min(scfg.tol, 1e-4 * delta);
    const SolveReport rep = solve(inst.op, data, inst.spec, scfg);

    std::string csv = "index,u_dagger,recovered\n";
    for (Eigen::Index i = 0; i < rep.minimizer.size(); ++i) {
      csv += std::to_string(i) + "," + format_double(inst.u_dagger[i]) + "," +
             format_double(rep.minimizer[i]) + "\n";
    }
    write_file_atomic(l.out_dir / "solution.csv", csv);

    json report = to_json(rep);
    report["delta"] = delta;
    report["alpha"] = alpha;
    report["config"] = config_json(c);
    report["instance"] = instance_json(inst);
    report["error_norm"] = (rep.minimizer - inst.u_dagger).norm();
    report["max_coefficient_error"] = (rep.minimizer - inst.u_dagger).cwiseAbs().maxCoeff();
    report["beta2"] = number_or_null(inst.source.beta2);
    if (c.p == 1) {
      const double ab = alpha * inst.source.beta2;
      // residual estimate (1 + alpha beta2) delta / (1 - alpha beta2)
      report["residual_bound"] = ab < 1.0 ? number_or_null(delta * (1.0 + ab) / (1.0 - ab)) : json(nullptr);
    }
    write_file_atomic(l.out_dir / "report.json", dump(report));

    out << "solve: delta=" << delta << " alpha=" << alpha << " iterations=" << rep.iterations
        << " converged=" << (rep.converged ? "yes" : "no")
        << " error=" << report["error_norm"].get<double>() << "\n";
    if (!rep.converged) {
      err << "solver did not converge within " << scfg.max_iter << " iterations\n";
      return static_cast<int>(kExitNumerical);
    }
    return static_cast<int>(kExitOk);
  });
}

int cmd_sweep(const CommandOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Loaded l = load(options);
    const ExperimentConfig& c = l.config;
    const ProblemInstance inst = generate_problem(c.problem_options());

    SweepOptions sopt;
    sopt.deltas = c.delta_grid();
    sopt.c_alpha = c.c_alpha;
    sopt.trials = c.trials;
    sopt.seed = c.seed;
    sopt.solver = c.solver_config();
    sopt.threads = c.threads;
    sopt.validation_samples = c.validation_samples;
    sopt.validation_radius = c.validation_radius;
    const SweepResult sweep = run_sweep(inst, sopt);

    std::ostringstream csv;
    write_sweep_csv(csv, sweep.rows);
    write_file_atomic(l.out_dir / "sweep.csv", csv.str());

    json report = to_json(sweep);
    report["config"] = config_json(c);
    report["instance"] = instance_json(inst);
    report["source"] = to_json(inst.source);
    report["fbi"] = to_json(inst.fbi);
    report["reference_slope"] = 1.0 / c.q;
    write_file_atomic(l.out_dir / "rate.json", dump(report));
    write_file_atomic(l.out_dir / "rate.svg", render_rate_svg(sweep, 1.0 / c.q));

    if (!sweep.rate) {
      err << "rate fit failed: " << sweep.fit_error << "\n";
      return static_cast<int>(kExitNumerical);
    }
    char line[160];
    std::snprintf(line, sizeof line, "sweep: slope=%.4f r2=%.4f points=%d reference=%.4f\n",
                  sweep.rate->slope, sweep.rate->r_squared, sweep.rate->n_points, 1.0 / c.q);
    out << line;
    return static_cast<int>(kExitOk);
  });
}

int cmd_check(const CommandOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Loaded l = load(options);
    const ExperimentConfig& c = l.config;
    const ProblemOptions popt = c.problem_options();
    ProblemInstance inst = build_problem(popt);
    try {
      inst = generate_problem(popt);
    } catch (const NumericalError&) {
      // keep the first draw so its failing reports are shown
    }

    std::vector<std::string> failures;
    json report;
    report["config"] = config_json(c);
    report["instance"] = instance_json(inst);
    report["source"] = to_json(inst.source);
    report["fbi"] = to_json(inst.fbi);
    if (!inst.source.valid) failures.push_back("source condition: " + inst.source.reason);
    if (!inst.fbi.injective()) failures.push_back("finite basis injectivity");

    const bool sparse = inst.sparsity < static_cast<std::size_t>(inst.u_dagger.size());
    if (inst.source.valid && inst.fbi.injective() && (sparse || c.q > 1.0)) {
      const RateConstants rc =
          estimate_rate_constants(*inst.op, inst.u_dagger, inst.spec, sparse ? c.q : 2.0,
                                  c.validation_samples, c.validation_radius, c.seed);
      report["constants"] = to_json(rc);
      if (!rc.certified) failures.push_back("rate constants: " + rc.note);
      if (rc.violations > 0) failures.push_back("rate constants: sampled violations");
    } else {
      report["constants"] = nullptr;
    }
    if (sparse && inst.fbi.injective()) {
      const SparseRateReport sr = check_sparse_rate_conditions(
          inst.op, inst.u_dagger, inst.spec, c.validation_samples, c.validation_radius, c.seed);
      report["sparse_conditions"] = to_json(sr);
      for (const std::string& f : sr.failures) failures.push_back("sparse conditions: " + f);
    }
    report["failures"] = failures;
    report["passed"] = failures.empty();

    const std::string text = dump(report);
    write_file_atomic(l.out_dir / "check.json", text);
    out << text;
    if (!failures.empty()) {
      for (const std::string& f : failures) err << "check failed: " << f << "\n";
      return static_cast<int>(kExitCondition);
    }
    return static_cast<int>(kExitOk);
  });
}

}  // namespace sparsereg::cli
