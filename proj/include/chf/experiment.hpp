#pragma once

#include <optional>
#include <string>
#include <vector>

#include "chf/config.hpp"
#include "chf/diagnostics.hpp"
#include "chf/fixed_point.hpp"
#include "chf/flow.hpp"

namespace chf {

/// Formats with 17 significant digits, enough to round-trip any double.
std::string format_double(double v);

struct ExperimentResult {
  int exit_status = 0;
  RunResult run;
  std::vector<DiagnosticsRecord> records;
  std::vector<ConcentrationEvent> events;
  std::vector<LocalEstimateSample> local_estimates;
  double eps1 = 0.0;
  std::string summary;
};

/// Runs the configured flow and writes timeseries.csv, events.csv,
/// local_estimates.csv, snapshots and final.chf into the output directory.
/// A diverged run keeps everything written so far and ends timeseries.csv with
/// a "# diverged" line. `extra` sees every recorded state.
ExperimentResult run_experiment(const RunConfig& config, const Observer& extra = {});
/// Same, continuing from a snapshot's full state (f, u, J, t).
ExperimentResult resume_experiment(const std::string& snapshot_path, const RunConfig& config);

struct ComparisonRow {
  double t = 0.0;
  std::optional<double> conformal_sup_g;
  std::optional<double> classic_sup;
};

struct ComparisonReport {
  int exit_status = 0;
  std::vector<ComparisonRow> rows;
  std::optional<double> conformal_crossing;
  std::optional<double> classic_crossing;
  double ceiling = 0.0;
  std::string summary;

  /// Classic crosses no later than the conformal run, or the conformal run never crosses.
  bool postponed() const;
};

/// Conformal flow (sup e^{-2u}|df|^2) against the classic flow (sup |df|^2)
/// from the same initial map; writes comparison.csv.
ComparisonReport compare_baseline(const RunConfig& config);

struct PicardRun {
  PicardReport report;
  std::string summary;
};

/// Picard iteration over [0, picard.T] with the flow's dt; writes picard.csv.
PicardRun run_picard(const RunConfig& config);

}  // namespace chf
