#pragma once

#include <iosfwd>

#include "gfbs/config.hpp"
#include "gfbs/errors.hpp"

namespace gfbs {

// Process exit statuses.
enum ExitStatus : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitSolver = 2,
  kExitOracle = 3,
  kExitCheckFailed = 4,  // certify verdict FAIL or compare deviation above 1e-8
};

int exit_status_for(ErrorCode code);

// Each command writes its files under config.out_dir and its console text to
// `out` / `err`; the return value is the exit status.
int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_certify(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_compare(const RunConfig& config, std::ostream& out, std::ostream& err);

// Full command line: gfbs {run|certify|compare} --config PATH [--seed U64]
// [--iters N] [--tol REAL] [--out DIR] [--jobs N]. --config and --seed may be
// repeated; every (config, seed) pair becomes one job.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace gfbs
