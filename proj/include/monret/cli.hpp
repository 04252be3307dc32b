#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "monret/io.hpp"

namespace monret::cli {

enum ExitCode : int {
  kOk = 0,
  kVerifyFailed = 1,
  kSchemaError = 2,
  kResonance = 3,
  kNumericalHealth = 4,
  kIoError = 5,
};

inline constexpr std::uint64_t kDefaultSeed = 1;

struct Options {
  std::optional<std::uint64_t> seed;  // overrides the config's "seed"
  int threads = 0;                    // 0: MONRET_THREADS, then all cores
  bool quiet = false;
};

// Runs one subcommand (exact, sample, trajectory, fluctuations, verify) and
// writes its artifacts into out_dir. Nothing is written unless the whole
// computation succeeds. Diagnostics go to `err`, tables and summaries to `out`.
int run(const std::string& subcommand, const Json& config, const std::string& out_dir,
        const Options& options, std::ostream& out, std::ostream& err);

// Same, reading the config from a file.
int run_file(const std::string& subcommand, const std::string& config_path,
             const std::string& out_dir, const Options& options, std::ostream& out,
             std::ostream& err);

}  // namespace monret::cli
