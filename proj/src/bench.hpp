#pragma once

// Experiment orchestration behind the command-line subcommands.
//
// Run directory layout (output.directory):
//   config.ini                 the effective configuration
//   manifest.json              one entry per kappa job
//   verdict.csv                merged verdicts, names prefixed "kappa_<k>:"
//   kappa_<k>/series.csv       time series (fixed column set)
//   kappa_<k>/diagnostics.csv  every recorded column
//   kappa_<k>/companion.csv    coarser companion run, when enabled
//   kappa_<k>/besov.csv        Besov report
//   kappa_<k>/estimates.csv    every estimate row
//   kappa_<k>/verdict.csv      one line per row family
//   kappa_<k>/checkpoints/     checkpoint_<step>.axbq
//   kappa_<k>/final.axbq

#include <ostream>
#include <string>
#include <vector>

#include "config.hpp"
#include "errors.hpp"
#include "monitor.hpp"

namespace axbq {

// Exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitError = 2;

struct CommandResult {
  int exit_status = kExitOk;
  ErrorCode error = ErrorCode::ok;  // first error, if any
  std::string error_message;
  std::vector<std::string> files;   // written files, relative to the output directory
};

// AXBQ_THREADS when set to a positive integer, otherwise the hardware
// concurrency.
int thread_count();

// One evolution per kappa (parallel up to thread_count()), then the enabled
// monitors. Solver and blow-up errors are recorded per job and reported
// through exit_status; configuration errors throw.
CommandResult cmd_run(const ExperimentConfig& cfg, std::ostream* log = nullptr);

// Operator identities, elliptic bounds, CKN, partition, Bernstein and the
// convergence ladders. Throws Error(grid_too_coarse) for a grid that cannot
// carry a dyadic partition. verify.mutation perturbs the modified Laplacian
// for the duration of the call.
CommandResult cmd_verify(const ExperimentConfig& cfg, std::ostream* log = nullptr);

// Convergence CSVs only.
CommandResult cmd_convergence(const ExperimentConfig& cfg, std::ostream* log = nullptr);

// Column-oriented plot files from a run or verify directory. Throws
// Error(missing_run) when there is nothing to plot.
CommandResult cmd_plotdata(const std::string& run_dir, const std::string& out_dir, std::ostream* log = nullptr);

// CSV of every estimate row: t,name,lhs,rhs,pass.
std::string estimates_csv(const EstimateReport& r);

// Directory name of a kappa job.
std::string kappa_dir(double kappa);

}  // namespace axbq
