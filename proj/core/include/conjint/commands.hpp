#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "conjint/problem_io.hpp"

namespace conjint {

/// Exit code contract shared by every subcommand:
/// 0 feasible/true, 1 infeasible/false, 2 parse error, 3 invariant violation,
/// 4 digest mismatch.
enum ExitCode : int {
  kExitFeasible = 0,
  kExitInfeasible = 1,
  kExitParse = 2,
  kExitInvariant = 3,
  kExitDigest = 4,
};

struct CliOptions {
  std::optional<double> tol_residual;  // --tol
  std::optional<double> tol_cluster;   // --cluster
  uint64_t seed = 0;                   // --seed
};

struct CommandResult {
  int exit_code = 0;
  std::string output;  // human report for stdout
};

CommandResult run_check(const std::string& problem_path, const CliOptions& opt);
CommandResult run_interpolate(const std::string& problem_path, const std::string& out_path,
                              const CliOptions& opt);
CommandResult run_verify(const std::string& problem_path, const std::string& certificate_path,
                         const CliOptions& opt);
CommandResult run_field(const std::string& problem_path, const std::string& out_path,
                        const CliOptions& opt);
CommandResult run_hyperinvariant(const std::string& problem_path, const CliOptions& opt);

}  // namespace conjint
