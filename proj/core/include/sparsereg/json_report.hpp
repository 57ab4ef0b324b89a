#pragma once

#include "sparsereg/analysis.hpp"
#include "sparsereg/experiments.hpp"
#include "sparsereg/rate_fit.hpp"
#include "sparsereg/solver.hpp"

#include <nlohmann/json.hpp>

namespace sparsereg {

/// JSON views of the report types. Non-finite numbers map to null.
nlohmann::json to_json(const SourceCertificate& cert);
nlohmann::json to_json(const FbiReport& fbi);
nlohmann::json to_json(const RateConstants& constants);
nlohmann::json to_json(const SparseRateReport& report);
nlohmann::json to_json(const RateEstimate& rate);
nlohmann::json to_json(const SolveReport& report, bool include_trace = false);
nlohmann::json to_json(const ExactRecoveryReport& report);
nlohmann::json to_json(const SweepResult& result);

/// A number, or null when x is NaN or infinite.
nlohmann::json number_or_null(double x);

}  // namespace sparsereg
