#pragma once

#include <iosfwd>
#include <string>

#include "vortex/run_config.hpp"

namespace vortex {

enum ExitCode : int {
    kExitOk = 0,
    kExitCheckFailed = 1,
    kExitConfigError = 2,
    kExitObstructed = 3,
    kExitBradlow = 4,
};

/// Output directory precedence: explicit flag, then `output_dir` from the
/// config, then the VORTEX_OUT_DIR environment variable, then "vortex_out".
std::string resolve_output_dir(const std::string& flag, const RunConfig& run);

/// Identity checks for the configured (N, ell) on the configured grid.
/// Writes verify.jsonl, verify.csv and meta.json into run.output_dir.
int cmd_verify(const RunConfig& run, std::ostream& log);

/// Futaki invariance report. Writes futaki.jsonl and futaki_samples.csv; with
/// sweep_ell, one report per ell = 0..N and futaki_sweep.csv instead.
int cmd_futaki(const RunConfig& run, bool sweep_ell, std::ostream& log);

/// Coupled solve with the radial cross-check. Writes solve.jsonl, trace.csv
/// and fields.csv.
int cmd_solve(const RunConfig& run, std::ostream& log);

} // namespace vortex
