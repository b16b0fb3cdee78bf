#pragma once

#include "pairmatch/distance.hpp"
#include "pairmatch/selection.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace pairmatch::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsageError = 1,
  kNumericalError = 2,
  kOracleMismatch = 3,
};

enum class Command { match, simulate, oracle, solve };

struct RunConfig {
  Command command = Command::match;
  std::filesystem::path input;
  std::filesystem::path out_dir;
  Method method = Method::optimal;
  std::size_t m = 0;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> reps;
  std::optional<DistanceForm> distance_form;
  std::optional<double> ridge;
  std::string scenario;
  std::filesystem::path scenario_file;
  std::size_t workers = 1;

  std::size_t trials = 500;
  std::size_t oracle_nodes = 8;
  std::size_t oracle_units = 8;
  std::size_t oracle_pairs = 2;
};

/// --seed if given, else PAIRMATCH_SEED if set, else `fallback`.
std::uint64_t resolve_seed(const RunConfig& config, std::uint64_t fallback);

int cmd_match(const RunConfig& config, std::ostream& out);
int cmd_simulate(const RunConfig& config, std::ostream& out);
int cmd_oracle(const RunConfig& config, std::ostream& out);
int cmd_solve(const RunConfig& config, std::ostream& out);

/// Parses argv, dispatches, and maps errors to exit codes. Diagnostics go
/// to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pairmatch::cli
