#include "commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  using namespace sparsereg::cli;
  CLI::App app{"Sparsity-promoting Tikhonov regularization experiments"};
  app.require_subcommand(1);

  CommandOptions opts;
  std::uint64_t seed = 0;
  double delta = 0.0;
  int threads = 1;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config, "Experiment config file")->required();
    sub->add_option_function<std::string>(
        "--out", [&](const std::string& dir) { opts.out = dir; }, "Output directory");
    sub->add_option("--seed", seed, "Override the config seed");
    sub->add_option("--threads", threads, "Worker threads (fallback: SPARSEREG_THREADS)");
  };

  CLI::App* solve = app.add_subcommand("solve", "Solve once at a given noise level");
  add_common(solve);
  solve->add_option("--delta", delta, "Noise level (default 0)");
  CLI::App* sweep = app.add_subcommand("sweep", "Run a noise sweep and fit the rate");
  add_common(sweep);
  CLI::App* check = app.add_subcommand("check", "Check source condition, injectivity and rate constants");
  add_common(check);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  CLI::App* chosen = app.get_subcommands().front();
  if (chosen->count("--seed") > 0) opts.seed = seed;
  if (chosen->count("--threads") > 0) opts.threads = threads;
  if (chosen == solve && solve->count("--delta") > 0) opts.delta = delta;

  if (chosen == solve) return cmd_solve(opts, std::cout, std::cerr);
  if (chosen == sweep) return cmd_sweep(opts, std::cout, std::cerr);
  return cmd_check(opts, std::cout, std::cerr);
}
