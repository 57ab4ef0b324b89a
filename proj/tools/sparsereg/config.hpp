#pragma once

#include "sparsereg/experiments.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sparsereg::cli {

/// Parse or validation failure; `line` is 0 when the problem is not tied
/// to a single line (e.g. a cross-field check).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, std::string field, const std::string& message);
  int line() const { return line_; }
  const std::string& field() const { return field_; }
  const std::string& message() const { return message_; }

 private:
  int line_;
  std::string field_;
  std::string message_;
};

struct ExperimentConfig {
  // [problem]
  ProblemKind kind = ProblemKind::Diagonal;
  TruthModel truth = TruthModel::Sparse;
  std::size_t n = 64;
  std::size_t m = 64;
  std::size_t sparsity = 3;
  double q = 1.0;
  int p = 2;
  double decay = 1.0;
  double kernel_width = 3.0;
  double epsilon = 1e-3;
  // [penalty]
  std::optional<std::vector<double>> weights;  // "uniform" when empty
  double weight = 1.0;
  // [sweep]
  double delta_min = 1e-4;
  double delta_max = 1e-1;
  int delta_count = 10;
  double c_alpha = 1.0;
  int trials = 5;
  int validation_samples = 1000;
  double validation_radius = 0.1;
  // [solve]
  std::optional<double> alpha;  // default: alpha_rule(delta, p, c_alpha)
  int max_iter = 50000;
  double tol = 1e-10;
  // [run]
  std::uint64_t seed = 0;
  std::string output = "out";
  int threads = 1;

  bool operator==(const ExperimentConfig&) const = default;

  ProblemOptions problem_options() const;
  std::vector<double> delta_grid() const;
  SolverConfig solver_config() const;
};

/// Sectioned key = value text; `#` starts a comment line.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical text form; parse_config(to_text(c)) == c.
std::string to_text(const ExperimentConfig& config);

/// Range checks shared by the parser and programmatic callers.
void validate(const ExperimentConfig& config);

}  // namespace sparsereg::cli
