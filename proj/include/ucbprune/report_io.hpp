// Copyright 2026 The ucbprune Authors
// SPDX-License-Identifier: Apache-2.0

// On-disk artifacts of a run or sweep.
//
// metrics.csv    step,train_loss,ratio,retained,eval_metric
//                (eval_metric empty off the eval cadence)
// scores.csv     step,w0,w1,...   one row per snapshot
// summary.json   config echo, final metric, mask flips, oracle reports,
//                wall-clock seconds, version
//
// Doubles are written in shortest round-trip form with '.' as the decimal
// separator, so reading a file back reproduces the in-memory values exactly.

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "ucbprune/experiments.hpp"
#include "ucbprune/oracle.hpp"

namespace ucbprune {

void write_metrics_csv(std::ostream& out, const RunReport& report);

struct MetricsTable {
  std::vector<StepRecord> per_step;
  std::vector<EvalPoint> eval_curve;
};
// Throws ConfigError on malformed input.
MetricsTable read_metrics_csv(std::istream& in);

void write_snapshots_csv(std::ostream& out, const std::vector<std::size_t>& steps,
                         const std::vector<std::vector<double>>& rows);

struct SnapshotTable {
  std::vector<std::size_t> steps;
  std::vector<std::vector<double>> rows;
};
SnapshotTable read_snapshots_csv(std::istream& in);

nlohmann::ordered_json oracle_reports_to_json(const std::vector<OracleReport>& reports);

nlohmann::ordered_json run_summary_json(const RunReport& report,
                                        const std::vector<OracleReport>& oracle_reports,
                                        double wall_clock_seconds);

// Writes metrics.csv, scores.csv, sensitivity.csv, summary.json and the
// resolved config into `dir` (created if missing).
void write_run_artifacts(const std::filesystem::path& dir, const RunReport& report,
                         double wall_clock_seconds);

// value,seed,final_metric,failed
void write_sweep_rows_csv(std::ostream& out, const SweepTable& table);
// value,mean,stddev,runs,failed
void write_sweep_aggregate_csv(std::ostream& out, const SweepTable& table);

}  // namespace ucbprune
