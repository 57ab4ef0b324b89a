// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include "oracles.hpp"

#include "sparsereg/experiments.hpp"
#include "sparsereg/penalty.hpp"
#include "sparsereg/random.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

using namespace sparsereg;

namespace {

constexpr std::uint64_t kReferenceSeed = 7;

int failures = 0;

void report(int id, bool pass, const std::string& what, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s -- %s\n", pass ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* pattern, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, pattern, a);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct RateRun {
  ProblemInstance instance;
  SweepResult sweep;
  double seconds = 0.0;
};

RateRun reference_sweep(double q, TruthModel truth) {
  ProblemOptions o;
  o.kind = ProblemKind::Diagonal;
  o.truth = truth;
  o.n = 64;
  o.m = 64;
  o.sparsity = 3;
  o.q = q;
  o.p = 2;
  o.decay = 1.0;
  o.seed = kReferenceSeed;
  SweepOptions s;
  s.deltas = log_delta_grid(1e-4, 1e-1, 10);
  s.c_alpha = 1.0;
  s.trials = 5;
  s.seed = kReferenceSeed;
  s.threads = 1;
  const auto t0 = std::chrono::steady_clock::now();
  RateRun run{generate_problem(o), {}, 0.0};
  run.sweep = run_sweep(run.instance, s);
  run.seconds = seconds_since(t0);
  return run;
}

std::string describe(const RateRun& r) {
  std::string out;
  if (r.sweep.rate) {
    out = "slope " + fmt("%.4f", r.sweep.rate->slope) + ", r2 " + fmt("%.4f", r.sweep.rate->r_squared) +
          ", points " + std::to_string(r.sweep.rate->n_points);
  } else {
    out = "no fit (" + r.sweep.fit_error + ")";
  }
  out += ", support {";
  bool first = true;
  for (Eigen::Index i : support_of(r.instance.u_dagger)) {
    out += (first ? "" : ",") + std::to_string(i);
    first = false;
  }
  out += "}, " + fmt("%.2f s", r.seconds);
  return out;
}

double slope_or_nan(const RateRun& r) {
  return r.sweep.rate ? r.sweep.rate->slope : std::nan("");
}

std::string sweep_csv(const SweepResult& s) {
  std::ostringstream out;
  write_sweep_csv(out, s.rows);
  return out.str();
}

}  // namespace

int main() {
  // 1-3: sparse rates on the diagonal reference problem
  const RateRun q1 = reference_sweep(1.0, TruthModel::Sparse);
  {
    const double s = slope_or_nan(q1);
    const bool pass = s >= 0.85 && s <= 1.15 && q1.sweep.rate->r_squared >= 0.98 && q1.seconds < 60.0;
    report(1, pass, "sparse q = 1 rate, slope in [0.85, 1.15], r2 >= 0.98, < 60 s", describe(q1));
  }
  const RateRun q15 = reference_sweep(1.5, TruthModel::Sparse);
  {
    const double s = slope_or_nan(q15);
    report(2, s >= 0.55 && s <= 0.80, "sparse q = 1.5 rate, slope in [0.55, 0.80]", describe(q15));
  }
  const RateRun q2 = reference_sweep(2.0, TruthModel::Sparse);
  {
    const double s = slope_or_nan(q2);
    report(3, s >= 0.40 && s <= 0.65, "sparse q = 2 rate, slope in [0.40, 0.65]", describe(q2));
  }

  // 4: source-condition rate with a non-sparse truth
  {
    const RateRun range = reference_sweep(1.5, TruthModel::Range);
    const double s = slope_or_nan(range);
    report(4, s >= 0.40, "range-condition q = 1.5 rate, slope >= 0.40",
           describe(range) + ", nonzeros " + std::to_string(range.instance.sparsity));
  }

  // 5: exact recovery for p = 1 on noise-free data
  {
    int passed = 0;
    double worst = 0.0;
    std::string bad;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      ProblemOptions o;
      o.kind = ProblemKind::RandomDense;
      o.n = 64;
      o.m = 32;
      o.sparsity = 3;
      o.q = 1.0;
      o.p = 1;
      o.seed = seed;
      const ProblemInstance inst = generate_problem(o);
      const ExactRecoveryReport rep = exact_recovery_test(inst, 0.5 / inst.source.beta2);
      worst = std::max(worst, rep.error / rep.tolerance);
      if (rep.status == RecoveryStatus::Pass) {
        ++passed;
      } else {
        bad += " seed " + std::to_string(seed) + ":" + to_string(rep.status);
      }
    }
    report(5, passed == 10, "exact p = 1 recovery, alpha = 0.5 / beta2, 10 instances",
           std::to_string(passed) + "/10 pass, worst error/tolerance " + fmt("%.3g", worst) + bad);
  }

  // 6: a-priori estimates on every validated row of 1-3
  {
    int rows = 0;
    int violations = 0;
    int unvalidated = 0;
    for (const RateRun* r : {&q1, &q15, &q2}) {
      if (!r->sweep.constants || !r->sweep.constants->validated) {
        ++unvalidated;
        continue;
      }
      for (const SweepRow& row : r->sweep.rows) {
        ++rows;
        if (!(row.error_norm <= row.err_bound) || !(row.residual_norm <= row.residual_bound)) ++violations;
      }
    }
    report(6, violations == 0 && rows > 0, "error and residual within the a-priori bounds",
           std::to_string(rows) + " rows checked, " + std::to_string(violations) + " violations, " +
               std::to_string(unvalidated) + " sweeps without validated constants");
  }

  // 7: prox against a golden-section oracle
  {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(derive_seed(kReferenceSeed, 7));
    double worst = 0.0;
    int count = 0;
    for (double q : {1.0, 1.25, 1.5, 1.75, 2.0}) {
      for (int i = 0; i < 1000; ++i) {
        const double z = rng.normal() * std::pow(10.0, rng.uniform(-2.0, 1.0));
        const double tau = std::pow(10.0, rng.uniform(-3.0, 1.0));
        const double w = rng.uniform(0.5, 2.0);
        Eigen::VectorXd zv(1);
        zv[0] = z;
        Eigen::VectorXd wv(1);
        wv[0] = w;
        const double x = prox_rq(zv, tau, PenaltySpec(q, wv))[0];
        worst = std::max(worst, std::abs(x - oracle::prox_scalar(z, tau * w, q)));
        ++count;
      }
    }
    const double t = seconds_since(t0);
    report(7, worst <= 1e-8 && t < 10.0, "prox matches scalar minimization to 1e-8, < 10 s",
           std::to_string(count) + " triples, max deviation " + fmt("%.3g", worst) + ", " + fmt("%.2f s", t));
  }

  // 8: Bregman lower bound and d_2
  {
    Rng rng(derive_seed(kReferenceSeed, 8));
    int violations = 0;
    double worst = std::numeric_limits<double>::infinity();
    for (double q : {1.25, 1.5, 2.0}) {
      for (int i = 0; i < 1000; ++i) {
        const auto n = static_cast<Eigen::Index>(1 + rng.below(32));
        Eigen::VectorXd w(n), u(n), ut(n);
        const double su = std::pow(10.0, rng.uniform(-2.0, 1.0));
        const double st = std::pow(10.0, rng.uniform(-2.0, 1.0));
        for (Eigen::Index k = 0; k < n; ++k) {
          w[k] = rng.uniform(0.5, 2.0);
          u[k] = su * rng.normal();
          ut[k] = st * rng.normal();
        }
        const PenaltySpec spec(q, w);
        const BregmanReport b = bregman_distance(ut, u, spec, subgradient_rq(u, spec));
        const double rhs = dq_constant(q) * spec.w_min() * spec.w_min() * (ut - u).squaredNorm() /
                           (3.0 * spec.w_min() + 2.0 * eval_rq(u, spec) + eval_rq(ut, spec));
        const double rel = (b.value - rhs) / std::max(rhs, 1e-300);
        worst = std::min(worst, rel);
        if (b.value < rhs * (1.0 - 1e-10)) ++violations;
      }
    }
    const double d2 = dq_constant(2.0);
    report(8, violations == 0 && std::abs(d2 - 2.0) <= 1e-3, "Bregman lower bound, d_2 = 2 +- 1e-3",
           "3000 pairs, " + std::to_string(violations) + " violations, min relative slack " + fmt("%.3g", worst) +
               ", d_2 = " + fmt("%.6f", d2) + ", d_1.5 = " + fmt("%.6f", dq_constant(1.5)));
  }

  // 9: sequence-norm monotonicity and coercivity
  {
    Rng rng(derive_seed(kReferenceSeed, 9));
    int v1 = 0;
    int v2 = 0;
    for (int i = 0; i < 10000; ++i) {
      const auto n = static_cast<Eigen::Index>(1 + rng.below(64));
      Eigen::VectorXd c(n);
      for (Eigen::Index k = 0; k < n; ++k) c[k] = rng.normal() * std::pow(10.0, rng.uniform(-3.0, 3.0));
      const double s = rng.uniform(0.1, 4.0);
      const double t = s + rng.uniform(0.0, 4.0);
      if (sequence_norm(c, t) > sequence_norm(c, s) * (1.0 + 1e-12)) ++v1;
    }
    for (int i = 0; i < 10000; ++i) {
      const auto n = static_cast<Eigen::Index>(1 + rng.below(64));
      const double q = rng.uniform(1.0, 2.0);
      Eigen::VectorXd w(n), u(n);
      for (Eigen::Index k = 0; k < n; ++k) {
        w[k] = rng.uniform(0.1, 3.0);
        u[k] = rng.normal() * std::pow(10.0, rng.uniform(-2.0, 2.0));
      }
      const PenaltySpec spec(q, w);
      if (eval_rq(u, spec) < spec.w_min() * std::pow(u.norm(), q) * (1.0 - 1e-12)) ++v2;
    }
    report(9, v1 == 0 && v2 == 0, "norm monotonicity and coercivity on 10^4 vectors each",
           std::to_string(v1) + " + " + std::to_string(v2) + " violations");
  }

  // 10: determinism of the criterion-1 sweep
  {
    const RateRun again = reference_sweep(1.0, TruthModel::Sparse);
    const std::string a = sweep_csv(q1.sweep);
    const std::string b = sweep_csv(again.sweep);
    report(10, a == b, "criterion-1 sweep CSV is bitwise reproducible",
           std::to_string(a.size()) + " bytes, " + (a == b ? "identical" : "different"));
  }

  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
