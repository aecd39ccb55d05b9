// Copyright 2026 The ucbprune Authors
// SPDX-License-Identifier: Apache-2.0

#include "ucbprune/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <thread>

#include "ucbprune/error.hpp"
#include "ucbprune/pruner.hpp"

namespace ucbprune {

std::string_view to_string(Grouping g) {
  switch (g) {
    case Grouping::kNone: return "none";
    case Grouping::kColumns: return "columns";
    case Grouping::kRows: return "rows";
  }
  return "unknown";
}

Grouping parse_grouping(std::string_view name) {
  for (auto g : {Grouping::kNone, Grouping::kColumns, Grouping::kRows}) {
    if (to_string(g) == name) return g;
  }
  throw ConfigError("structured.groups: unknown grouping '" + std::string(name) +
                    "' (expected none, columns or rows)");
}

ScheduleConfig ExperimentConfig::effective_schedule() const {
  ScheduleConfig s = schedule;
  s.total_steps = total_steps;
  return s;
}

void ExperimentConfig::validate() const {
  model.validate();
  dataset.validate();
  score.validate();
  if (total_steps == 0) throw ConfigError("train.total_steps must be positive");
  effective_schedule().validate();
  if (!(lr > 0.0) || !std::isfinite(lr)) throw ConfigError("train.lr must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ConfigError("train.momentum must lie in [0, 1)");
  if (batch_size == 0 || batch_size > dataset.n_train) {
    throw ConfigError("train.batch_size must lie in [1, dataset.n_train]");
  }
  if (snapshot_every == 0) throw ConfigError("train.snapshot_every must be >= 1");
  if (eval_every == 0) throw ConfigError("train.eval_every must be >= 1");
}

namespace {

constexpr double kDivergenceFactor = 1e3;
constexpr std::size_t kDivergenceSteps = 50;

}  // namespace

RunReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  const ScheduleConfig schedule = config.effective_schedule();
  const DataSplit data = generate_dataset(config.dataset);
  check_compatible(config.model, data.train);

  RunReport report;
  report.config_echo = config;
  report.metric_name = data.train.classification ? "accuracy" : "mse";

  ParamState params = init_params(config.model, data.train.input_dim, derive_seed(config.seed, 1));
  BatchStream batches(data.train.size(), config.batch_size, derive_seed(config.seed, 2));
  const bool structured = config.structured != Grouping::kNone;
  std::optional<GroupPartition> partition;
  if (config.structured == Grouping::kColumns) partition = GroupPartition::columns(params);
  if (config.structured == Grouping::kRows) partition = GroupPartition::rows(params);

  const std::vector<std::uint8_t> prunable(params.prunable().begin(), params.prunable().end());
  report.prunable = prunable;
  report.prunable_count = params.prunable_count();
  PruneState state = structured ? PruneState::fresh(partition->size(), PruneMode::kStructured)
                                : PruneState::fresh(params.size());
  std::vector<double> velocity(config.momentum > 0.0 ? params.size() : 0, 0.0);
  Mask previous = Mask::ones(params.size());
  report.per_step.reserve(config.total_steps);

  double first_loss = 0.0;
  std::size_t streak = 0;
  const auto fail = [&](std::size_t step, const std::string& why) {
    report.failed = true;
    report.failure = "step " + std::to_string(step) + ": " + why;
    report.final_metric = std::numeric_limits<double>::quiet_NaN();
  };

  for (std::size_t t = 0; t < config.total_steps; ++t) {
    const auto batch = batches.next();
    LossGrad lg;
    PruneStepOutput out;
    try {
      lg = loss_and_grad(config.model, params, data.train, batch);
      if (t == 0) first_loss = lg.loss;
      streak = first_loss > 0.0 && lg.loss > kDivergenceFactor * first_loss ? streak + 1 : 0;
      if (streak >= kDivergenceSteps) {
        fail(t, "loss above 1000x its initial value for 50 consecutive steps");
        break;
      }
      std::span<const double> direction;
      if (!velocity.empty()) {
        for (std::size_t j = 0; j < velocity.size(); ++j) {
          velocity[j] = config.momentum * velocity[j] + lg.grad[j];
        }
        direction = velocity;
      }
      out = structured ? prune_step_structured(params, state, lg.grad, config.lr, schedule,
                                               config.score, *partition, direction)
                       : prune_step(params, state, lg.grad, config.lr, schedule, config.score,
                                    direction);
    } catch (const NumericError& e) {
      fail(t, e.what());
      break;
    }

    // Pruned entries restart from zero, momentum included.
    for (std::size_t j = 0; j < velocity.size(); ++j) {
      if (!out.mask[j]) velocity[j] = 0.0;
    }
    for (std::size_t j = 0; j < params.size(); ++j) {
      if (prunable[j] && out.mask[j] != previous[j]) ++report.mask_flips;
    }

    const std::size_t step = t + 1;
    const double ratio = ratio_at(static_cast<double>(step), schedule);
    // Measured from the mask itself, so the ratio/retained columns can be
    // checked against the schedule.
    std::size_t kept = 0;
    if (structured) {
      for (const auto& group : *partition) kept += out.mask[group.front()];
    } else {
      kept = out.mask.count_where(prunable);
    }
    report.per_step.push_back({step, lg.loss, ratio, kept});
    if (step % config.snapshot_every == 0) {
      report.snapshot_steps.push_back(step);
      report.score_snapshots.push_back(out.scores);
      report.sensitivity_snapshots.push_back(out.sensitivity);
    }
    params = std::move(out.params);
    state = std::move(out.state);
    previous = std::move(out.mask);
    report.final_scores = std::move(out.scores);
    if (step % config.eval_every == 0 || step == config.total_steps) {
      report.eval_curve.push_back({step, evaluate(config.model, params, data.eval)});
    }
  }

  report.final_mask = previous;
  if (structured) {
    report.final_unit_mask = Mask::zeros(partition->size());
    for (std::size_t g = 0; g < partition->size(); ++g) {
      report.final_unit_mask.set(g, previous[(*partition)[g].front()]);
    }
    report.final_unit_scores = report.final_scores;
  } else {
    const auto idx = params.prunable_indices();
    report.final_unit_mask = Mask::zeros(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
      report.final_unit_mask.set(i, previous[idx[i]]);
      if (!report.final_scores.empty()) report.final_unit_scores.push_back(report.final_scores[idx[i]]);
    }
  }
  report.final_params.assign(params.values().begin(), params.values().end());
  report.final_retained = previous.count_where(prunable);
  if (!report.failed) report.final_metric = evaluate(config.model, params, data.eval);
  return report;
}

std::vector<OracleReport> consistency_checks(const RunReport& report) {
  std::vector<OracleReport> out;
  const ScheduleConfig schedule = report.config_echo.effective_schedule();

  OracleReport ratio{"schedule.ratio_column", 0.0, 0.0, 0, true};
  for (const auto& row : report.per_step) {
    ratio.max_abs_error = std::max(
        ratio.max_abs_error, std::fabs(row.ratio - ratio_at(static_cast<double>(row.step), schedule)));
    ++ratio.cases_checked;
  }
  ratio.pass = ratio.max_abs_error <= ratio.tolerance;
  out.push_back(ratio);

  OracleReport card{"projection.cardinality", 0.0, 0.0, 0, true};
  const std::size_t units = report.final_unit_mask.size();
  for (const auto& row : report.per_step) {
    const double want = static_cast<double>(retained_count(row.ratio, units));
    card.max_abs_error = std::max(card.max_abs_error,
                                  std::fabs(static_cast<double>(row.retained) - want));
    ++card.cases_checked;
  }
  card.pass = card.max_abs_error <= card.tolerance;
  out.push_back(card);

  if (!report.failed && !report.per_step.empty()) {
    OracleReport proj{"projection.final_mask", 0.0, 0.0, 1, true};
    const Mask want = topk_by_sort(report.final_unit_scores, report.per_step.back().retained);
    double mismatches = static_cast<double>(want.size());
    if (want.size() == report.final_unit_mask.size()) {
      mismatches = 0.0;
      for (std::size_t i = 0; i < want.size(); ++i) mismatches += want[i] != report.final_unit_mask[i];
    }
    proj.max_abs_error = mismatches;
    proj.pass = proj.max_abs_error <= proj.tolerance;
    out.push_back(proj);
  }
  return out;
}

namespace {

double quantile(std::vector<double> sorted, double q) {
  if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

VariabilityStats variability_stats(const std::vector<std::vector<double>>& snapshots,
                                   Transform transform) {
  if (snapshots.size() < 2) throw RangeError("variability_stats: needs at least 2 snapshots");
  const std::size_t width = snapshots.front().size();
  for (const auto& row : snapshots) {
    if (row.size() != width) throw DimensionError("variability_stats: ragged snapshot matrix");
  }

  VariabilityStats stats;
  stats.per_weight_std.assign(width, std::numeric_limits<double>::quiet_NaN());
  std::vector<double> used;
  std::vector<double> column;
  for (std::size_t w = 0; w < width; ++w) {
    column.clear();
    for (const auto& row : snapshots) {
      const double v = row[w];
      if (transform == Transform::kLog) {
        if (!(v > 0.0)) {
          ++stats.zeros_excluded;
          continue;
        }
        column.push_back(std::log(v));
      } else {
        column.push_back(v);
      }
    }
    if (column.size() < 2) {
      ++stats.weights_excluded;
      continue;
    }
    double mean = 0.0;
    for (double v : column) mean += v;
    mean /= static_cast<double>(column.size());
    double var = 0.0;
    for (double v : column) var += (v - mean) * (v - mean);
    var /= static_cast<double>(column.size());
    stats.per_weight_std[w] = std::sqrt(var);
    used.push_back(stats.per_weight_std[w]);
  }
  stats.weights_used = used.size();
  if (used.empty()) {
    throw NumericError("variability_stats: every weight trajectory was excluded");
  }
  std::sort(used.begin(), used.end());
  stats.median = quantile(used, 0.5);
  stats.q25 = quantile(used, 0.25);
  stats.q75 = quantile(used, 0.75);
  return stats;
}

VariabilityComparison compare_variability(const RunReport& report, std::size_t after_step) {
  if (report.score_snapshots.size() != report.sensitivity_snapshots.size()) {
    throw DimensionError("compare_variability: score and sensitivity snapshot counts differ");
  }
  std::vector<std::size_t> columns;
  if (!report.score_snapshots.empty()) {
    const std::size_t width = report.score_snapshots.front().size();
    for (std::size_t j = 0; j < width; ++j) {
      if (width != report.prunable.size() || report.prunable[j]) columns.push_back(j);
    }
  }
  std::vector<std::vector<double>> score;
  std::vector<std::vector<double>> sens;
  for (std::size_t i = 0; i < report.snapshot_steps.size(); ++i) {
    if (report.snapshot_steps[i] <= after_step) continue;
    const auto& s = report.score_snapshots[i];
    const auto& x = report.sensitivity_snapshots[i];
    if (s.size() != x.size()) throw DimensionError("compare_variability: ragged snapshot row");
    std::vector<double> srow;
    std::vector<double> xrow;
    for (std::size_t j : columns) {
      const bool live = x[j] > 0.0;
      srow.push_back(live ? s[j] : 0.0);
      xrow.push_back(live ? x[j] : 0.0);
    }
    score.push_back(std::move(srow));
    sens.push_back(std::move(xrow));
  }
  VariabilityComparison out;
  out.snapshots_used = score.size();
  out.score = variability_stats(score, Transform::kLog);
  out.sensitivity = variability_stats(sens, Transform::kLog);
  return out;
}

std::string_view to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::kRatio: return "ratio";
    case SweepAxis::kBeta1: return "beta1";
    case SweepAxis::kBeta2: return "beta2";
    case SweepAxis::kVariant: return "variant";
  }
  return "unknown";
}

SweepAxis parse_sweep_axis(std::string_view name) {
  for (auto a : {SweepAxis::kRatio, SweepAxis::kBeta1, SweepAxis::kBeta2, SweepAxis::kVariant}) {
    if (to_string(a) == name) return a;
  }
  throw ConfigError("unknown sweep axis '" + std::string(name) +
                    "' (expected ratio, beta1, beta2 or variant)");
}

namespace {

double parse_axis_number(std::string_view value, SweepAxis axis) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("sweep axis " + std::string(to_string(axis)) + ": '" + std::string(value) +
                      "' is not a number");
  }
  return v;
}

}  // namespace

ExperimentConfig with_axis_value(const ExperimentConfig& base, SweepAxis axis,
                                 std::string_view value) {
  ExperimentConfig cfg = base;
  switch (axis) {
    case SweepAxis::kRatio:
      cfg.schedule.r_final = parse_axis_number(value, axis);
      break;
    case SweepAxis::kBeta1:
      cfg.score.beta1 = parse_axis_number(value, axis);
      break;
    case SweepAxis::kBeta2:
      cfg.score.beta2 = parse_axis_number(value, axis);
      break;
    case SweepAxis::kVariant:
      cfg.score.variant = parse_score_variant(value);
      break;
  }
  cfg.validate();
  return cfg;
}

std::vector<RunReport> run_many(std::span<const ExperimentConfig> configs, std::size_t parallel) {
  std::vector<RunReport> reports(configs.size());
  std::size_t workers = parallel == 0 ? std::max(1u, std::thread::hardware_concurrency()) : parallel;
  workers = std::min(workers, std::max<std::size_t>(configs.size(), 1));
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      try {
        reports[i] = run_experiment(configs[i]);
      } catch (const Error& e) {
        reports[i].config_echo = configs[i];
        reports[i].failed = true;
        reports[i].failure = e.what();
        reports[i].final_metric = std::numeric_limits<double>::quiet_NaN();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return reports;
}

SweepTable sweep(const ExperimentConfig& base, SweepAxis axis,
                 std::span<const std::string> values, std::span<const std::uint64_t> seeds,
                 std::size_t parallel) {
  if (values.empty()) throw ConfigError("sweep: no axis values given");
  if (seeds.empty()) throw ConfigError("sweep: no seeds given");
  std::vector<ExperimentConfig> configs;
  for (const auto& v : values) {
    const ExperimentConfig at = with_axis_value(base, axis, v);
    for (std::uint64_t seed : seeds) {
      ExperimentConfig c = at;
      c.seed = seed;
      configs.push_back(std::move(c));
    }
  }
  const auto reports = run_many(configs, parallel);

  SweepTable table;
  table.axis = axis;
  for (std::size_t vi = 0; vi < values.size(); ++vi) {
    SweepAggregate agg;
    agg.value = values[vi];
    std::vector<double> ok;
    for (std::size_t si = 0; si < seeds.size(); ++si) {
      const RunReport& r = reports[vi * seeds.size() + si];
      table.rows.push_back({values[vi], seeds[si], r.final_metric, r.failed, r.failure});
      ++agg.runs;
      if (r.failed) {
        ++agg.failed;
      } else {
        ok.push_back(r.final_metric);
      }
    }
    if (ok.empty()) {
      agg.mean = agg.stddev = std::numeric_limits<double>::quiet_NaN();
    } else {
      for (double m : ok) agg.mean += m;
      agg.mean /= static_cast<double>(ok.size());
      double var = 0.0;
      for (double m : ok) var += (m - agg.mean) * (m - agg.mean);
      agg.stddev = ok.size() > 1 ? std::sqrt(var / static_cast<double>(ok.size() - 1)) : 0.0;
    }
    table.aggregates.push_back(std::move(agg));
  }
  return table;
}

}  // namespace ucbprune
