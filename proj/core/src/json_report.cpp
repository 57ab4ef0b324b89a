#include "sparsereg/json_report.hpp"

#include <cmath>

namespace sparsereg {

namespace {

using nlohmann::json;

json vector_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(number_or_null(v[i]));
  return arr;
}

json index_json(const std::vector<Eigen::Index>& idx) {
  json arr = json::array();
  for (Eigen::Index i : idx) arr.push_back(i);
  return arr;
}

}  // namespace

json number_or_null(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

json to_json(const SourceCertificate& c) {
  return {
      {"valid", c.valid},
      {"reason", c.reason},
      {"residual", number_or_null(c.residual)},
      {"beta2", number_or_null(c.beta2)},
      {"off_support_gap", number_or_null(c.off_support_gap)},
      {"omega", vector_json(c.omega)},
      {"xi", vector_json(c.xi)},
  };
}

json to_json(const FbiReport& f) {
  return {
      {"injective", f.injective()},
      {"empty_support", f.empty_support},
      {"support", index_json(f.support)},
      {"sigma_min", number_or_null(f.sigma_min)},
      {"injectivity_constant", number_or_null(f.injectivity_constant)},
  };
}

json to_json(const RateConstants& c) {
  return {
      {"certified", c.certified},
      {"note", c.note},
      {"route", c.route == RateRoute::Sparse ? "sparse" : "source-condition"},
      {"beta1", number_or_null(c.beta1)},
      {"beta2", number_or_null(c.beta2)},
      {"r", c.r},
      {"rho", number_or_null(c.rho)},
      {"sigma", number_or_null(c.sigma)},
      {"validated", c.validated},
      {"samples_checked", c.samples_checked},
      {"samples_skipped", c.samples_skipped},
      {"violations", c.violations},
      {"worst_slack", number_or_null(c.worst_slack)},
      {"violating_samples", c.violating_samples},
  };
}

json to_json(const SparseRateReport& r) {
  json j = {
      {"passed", r.passed},
      {"linear", r.linear},
      {"failures", r.failures},
      {"source", to_json(r.source)},
      {"fbi", to_json(r.fbi)},
      {"samples", r.samples},
      {"violations", r.violations},
  };
  if (r.linear) {
    j["gamma3"] = number_or_null(r.gamma3);
    j["gamma2_certified"] = number_or_null(r.gamma2_certified);
    j["gamma2_sampled"] = number_or_null(r.gamma2_sampled);
  } else {
    j["gamma1"] = number_or_null(r.gamma1);
    j["gamma2"] = number_or_null(r.gamma2);
  }
  return j;
}

json to_json(const RateEstimate& r) {
  return {
      {"slope", number_or_null(r.slope)},
      {"intercept", number_or_null(r.intercept)},
      {"r_squared", number_or_null(r.r_squared)},
      {"n_points", r.n_points},
  };
}

json to_json(const SolveReport& r, bool include_trace) {
  json j = {
      {"objective", number_or_null(r.objective)},
      {"residual_norm", number_or_null(r.residual_norm)},
      {"penalty_value", number_or_null(r.penalty_value)},
      {"iterations", r.iterations},
      {"converged", r.converged},
      {"last_step", number_or_null(r.last_step)},
  };
  if (include_trace) {
    json trace = json::array();
    for (double v : r.objective_trace) trace.push_back(number_or_null(v));
    j["objective_trace"] = std::move(trace);
  }
  return j;
}

json to_json(const ExactRecoveryReport& r) {
  return {
      {"status", to_string(r.status)},
      {"error", number_or_null(r.error)},
      {"tolerance", number_or_null(r.tolerance)},
      {"alpha", number_or_null(r.alpha)},
      {"beta2", number_or_null(r.beta2)},
      {"iterations", r.iterations},
      {"converged", r.converged},
  };
}

json to_json(const SweepResult& s) {
  json levels = json::array();
  for (std::size_t k = 0; k < s.deltas.size(); ++k) {
    levels.push_back({
        {"delta", s.deltas[k]},
        {"mean_error", number_or_null(s.mean_errors[k])},
        {"used_in_fit", static_cast<bool>(s.used_in_fit[k])},
    });
  }
  json j = {
      {"levels", std::move(levels)},
      {"all_converged", s.all_converged},
      {"rate", s.rate ? to_json(*s.rate) : json(nullptr)},
      {"constants", s.constants ? to_json(*s.constants) : json(nullptr)},
  };
  if (!s.fit_error.empty()) j["fit_error"] = s.fit_error;
  return j;
}

}  // namespace sparsereg
