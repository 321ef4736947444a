#ifndef FB_PIPELINE_HPP
#define FB_PIPELINE_HPP

#include "fb/config.hpp"

#include <string>

namespace fb {

// CLI exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitSolver = 1;
inline constexpr int kExitVerification = 2;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitSchema = 65;
inline constexpr int kExitIo = 66;

struct SolveArtifacts {
    SolveTrace trace;
    VerificationReport report;
    int exit_code = kExitOk;
};

/// Full pipeline: endpoint -> mountain pass at eps_1 -> Newton continuation
/// down the schedule -> free boundary extraction -> verification. Writes
/// fields, polylines, trace.json, report.json and a timings sidecar into
/// out_dir (created if missing). Also runs the Nehari minimization of the
/// sharp functional for the cross-method energy comparison when
/// with_nehari_crosscheck is set.
SolveArtifacts run_solve(const RunConfig& cfg, const std::string& out_dir,
                         bool with_nehari_crosscheck = false);

/// Repeats run_solve over sweep.values applied to sweep.axis; per-run output
/// directories and a combined summary.csv. Per-run failures are recorded and
/// the sweep continues. threads > 1 runs entries concurrently.
int run_sweep(const RunConfig& cfg, const std::string& out_dir, int threads = 1);

/// Re-runs verification from serialized fields; byte-identical report for
/// identical inputs.
int run_verify(const RunConfig& cfg, const std::string& run_dir, const std::string& out_path);

} // namespace fb

#endif
