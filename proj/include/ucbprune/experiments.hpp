// Copyright 2026 The ucbprune Authors
// SPDX-License-Identifier: Apache-2.0

// End-to-end pruning runs, score-variability statistics and parameter sweeps.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ucbprune/core.hpp"
#include "ucbprune/importance.hpp"
#include "ucbprune/models.hpp"
#include "ucbprune/oracle.hpp"
#include "ucbprune/scheduler.hpp"

namespace ucbprune {

inline constexpr std::string_view kVersion = "0.1.0";

enum class Grouping { kNone, kColumns, kRows };

std::string_view to_string(Grouping g);
Grouping parse_grouping(std::string_view name);

struct ExperimentConfig {
  ModelSpec model;
  DatasetSpec dataset;
  ScheduleConfig schedule;  // total_steps is taken from the field below
  ScoreConfig score;
  double lr = 0.1;
  double momentum = 0.0;  // 0 = plain SGD
  std::size_t batch_size = 32;
  std::size_t total_steps = 1000;
  std::uint64_t seed = 0;  // initialisation and batch order
  std::size_t snapshot_every = 10;
  std::size_t eval_every = 100;
  Grouping structured = Grouping::kNone;
  // key=value overrides applied on top of the config file, kept verbatim.
  std::vector<std::string> overrides;

  ScheduleConfig effective_schedule() const;
  void validate() const;
};

struct StepRecord {
  std::size_t step = 0;  // 1..T, the iteration that produced theta^(step)
  double train_loss = 0.0;
  double ratio = 0.0;
  std::size_t retained = 0;
};

struct EvalPoint {
  std::size_t step = 0;
  double metric = 0.0;
};

struct RunReport {
  std::vector<StepRecord> per_step;
  std::vector<EvalPoint> eval_curve;
  double final_metric = 0.0;
  std::string metric_name;  // "accuracy" or "mse"

  // Scores (and raw per-step sensitivities) recorded every snapshot_every
  // steps; one row per entry of snapshot_steps.
  std::vector<std::size_t> snapshot_steps;
  std::vector<std::vector<double>> score_snapshots;
  std::vector<std::vector<double>> sensitivity_snapshots;

  // Prunable entries whose mask bit changed between consecutive steps,
  // summed over the run (the starting mask is all ones).
  std::size_t mask_flips = 0;

  Mask final_mask;
  std::vector<double> final_params;
  std::vector<double> final_scores;
  // The last selection seen from the ranker's side: scores and keep-bits of
  // the scoring units (prunable entries in index order, or groups).
  std::vector<double> final_unit_scores;
  Mask final_unit_mask;
  std::vector<std::uint8_t> prunable;  // per parameter entry
  std::size_t prunable_count = 0;
  std::size_t final_retained = 0;

  bool failed = false;
  std::string failure;
  ExperimentConfig config_echo;
};

// Runs config.total_steps pruning iterations. Numeric failures do not throw:
// they end the run early and come back as a report with failed = true.
// Divergence means a non-finite loss, or a loss above 1000x the first loss
// for 50 consecutive steps.
RunReport run_experiment(const ExperimentConfig& config);

// Self-checks on a finished run (ratio column against the schedule, final
// mask against a sort-based top-k). Included in run summaries.
std::vector<OracleReport> consistency_checks(const RunReport& report);

enum class Transform { kNone, kLog };

struct VariabilityStats {
  // Population standard deviation of each column over the snapshot rows,
  // after the transform. NaN for excluded columns.
  std::vector<double> per_weight_std;
  std::size_t weights_used = 0;
  std::size_t weights_excluded = 0;  // fewer than two positive values under log
  std::size_t zeros_excluded = 0;    // non-positive entries dropped under log
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
  double iqr() const { return q75 - q25; }
};

// Per-weight dispersion across snapshots (rows = steps, columns = weights).
VariabilityStats variability_stats(const std::vector<std::vector<double>>& snapshots,
                                   Transform transform);

// Score against raw-sensitivity variability on one run. Only snapshots after
// `after_step` are used, and only cells where the raw sensitivity is positive
// (the entry is live); the same cells are dropped from both streams. In
// entrywise runs non-prunable entries are left out.
struct VariabilityComparison {
  VariabilityStats score;
  VariabilityStats sensitivity;
  std::size_t snapshots_used = 0;
  double median_ratio() const { return score.median / sensitivity.median; }
};

VariabilityComparison compare_variability(const RunReport& report, std::size_t after_step);

enum class SweepAxis { kRatio, kBeta1, kBeta2, kVariant };

std::string_view to_string(SweepAxis a);
SweepAxis parse_sweep_axis(std::string_view name);

// Copy of base with one axis value applied. Throws ConfigError when the
// value does not parse or produces an invalid config.
ExperimentConfig with_axis_value(const ExperimentConfig& base, SweepAxis axis,
                                 std::string_view value);

struct SweepRow {
  std::string value;
  std::uint64_t seed = 0;
  double final_metric = 0.0;
  bool failed = false;
  std::string failure;
};

struct SweepAggregate {
  std::string value;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation over successful seeds
  std::size_t runs = 0;
  std::size_t failed = 0;
};

struct SweepTable {
  SweepAxis axis = SweepAxis::kRatio;
  std::vector<SweepRow> rows;              // value-major, seed-minor
  std::vector<SweepAggregate> aggregates;  // one per value, input order
};

// One run per (value, seed). Rows come back in input order whatever the
// degree of parallelism (0 = hardware concurrency). Failed runs become
// failed rows and do not stop the sweep.
SweepTable sweep(const ExperimentConfig& base, SweepAxis axis,
                 std::span<const std::string> values, std::span<const std::uint64_t> seeds,
                 std::size_t parallel = 0);

// Runs configs concurrently; results line up with the input.
std::vector<RunReport> run_many(std::span<const ExperimentConfig> configs,
                                std::size_t parallel = 0);

}  // namespace ucbprune
