// monret: first detected return statistics from a JSON experiment config.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "monret/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"First detected return statistics under random-time monitoring"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  int threads = 0;
  bool quiet = false;

  const std::pair<const char*, const char*> commands[] = {
      {"exact", "moments and generating functions from the averaged superoperators"},
      {"sample", "Monte Carlo first detection histogram and moments"},
      {"trajectory", "single realizations: amplitudes, phi(omega) curves and windings"},
      {"fluctuations", "second moment curves of the symmetric two-level system"},
      {"verify", "identity residuals; nonzero exit if any check fails"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory")->capture_default_str();
    sub->add_option("--seed", seed, "master seed for stochastic commands");
    sub->add_option("--threads", threads, "worker threads (default: MONRET_THREADS or all cores)")
        ->check(CLI::NonNegativeNumber);
    sub->add_flag("--quiet", quiet, "suppress the summary on stdout");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : monret::cli::kSchemaError;
  }

  CLI::App* sub = app.get_subcommands().front();
  monret::cli::Options options;
  if (sub->count("--seed") > 0) options.seed = seed;
  options.threads = threads;
  options.quiet = quiet;
  return monret::cli::run_file(sub->get_name(), config_path, out_dir, options, std::cout, std::cerr);
}
