#pragma once

#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "aqite/config.hpp"
#include "aqite/diagnostics.hpp"
#include "aqite/generator.hpp"
#include "json.hpp"

namespace aqite {

/// Process exit codes of the CLI.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitDiverged = 3,
  kExitResource = 4,
};

/// Run-level checks that are not part of the CSV.
struct RunExtras {
  /// Largest |coefficient| of a string anticommuting with X...X, over all
  /// snapshots.
  double max_parity_violation = 0.0;
  double max_hermiticity_residual = 0.0;
  /// max_support_width <= active width at every snapshot of a truncated run.
  bool locality_ok = true;
  int max_locality_excess = 0;
  long frozen_substeps = 0;
  long half_substeps = 0;
  long full_substeps = 0;
};

struct RunResult {
  std::vector<TrajectoryRecord> records;
  TrajectorySummary summary;
  RunExtras extras;
};

/// Called once per sampled snapshot, after its record is assembled.
using RecordObserver =
    std::function<void(const Propagator&, const TrajectoryRecord&)>;

/// Integrates `spec` and assembles one record per sampled time.
RunResult run_experiment(const ExperimentSpec& spec,
                         const RecordObserver& observer = {});

inline constexpr const char* kRecordColumns =
    "tau,i_tau,i_inf,gap,gap_sector,norm,e0_residual,term_count,"
    "max_support_width";

std::string records_csv(std::span<const TrajectoryRecord> records);
/// Parses a records file. Throws SchemaError on missing columns, malformed
/// rows or an empty table.
std::vector<TrajectoryRecord> parse_records_csv(const std::string& text,
                                                const std::string& origin);
std::vector<TrajectoryRecord> read_records_csv(
    const std::filesystem::path& path);

/// Deterministic summary (no timestamps).
nlohmann::json summary_json(const ExperimentSpec& spec,
                            const RunResult& result);

/// `dir` under $AQITE_OUTPUT_ROOT when that is set and `dir` is relative.
std::filesystem::path resolve_output_dir(const std::string& dir);

/// Runs `spec` and writes records.csv, summary.json, metadata.json,
/// config.txt and optional snapshots/ under `dir`. On failure writes
/// error.json and rethrows.
RunResult run_to_directory(const ExperimentSpec& spec,
                           const std::filesystem::path& dir);

/// Machine-readable error payload and the matching exit code.
nlohmann::json error_json(const std::exception& e);
int exit_code_for(const std::exception& e);

struct SweepOutcome {
  nlohmann::json index;
  bool all_ok = true;
};

/// Runs every point of `sweep` on `jobs` worker threads. Point i writes to
/// `root`/point_<i>; `root`/index.json maps points to directories and
/// status. Results do not depend on `jobs`.
SweepOutcome run_sweep(const SweepSpec& sweep, int jobs,
                       const std::filesystem::path& root);

}  // namespace aqite
