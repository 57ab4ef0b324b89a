#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace sparsereg::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitNumerical = 2,
  kExitCondition = 3,
};

struct CommandOptions {
  std::filesystem::path config;
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
  std::optional<double> delta;    // solve only
  std::optional<int> threads;
};

/// One regularized solve; writes solution.csv and report.json.
int cmd_solve(const CommandOptions& options, std::ostream& out, std::ostream& err);

/// Noise sweep; writes sweep.csv, rate.json and rate.svg.
int cmd_sweep(const CommandOptions& options, std::ostream& out, std::ostream& err);

/// Condition checks; prints and writes check.json.
int cmd_check(const CommandOptions& options, std::ostream& out, std::ostream& err);

/// --threads, else SPARSEREG_THREADS, else the config value.
int resolve_threads(std::optional<int> flag, int config_value);

/// Writes `content` to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace sparsereg::cli
