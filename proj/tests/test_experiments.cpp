// Copyright 2026 The ucbprune Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "ucbprune/config_io.hpp"
#include "ucbprune/error.hpp"
#include "ucbprune/experiments.hpp"
#include "ucbprune/report_io.hpp"

namespace ucbprune {
namespace {

constexpr const char* kSmall = R"(
[model]
kind = mlp
layer_sizes = 6,8,2
activation = tanh

[dataset]
kind = gaussian_classification
n_train = 128
n_eval = 128
input_dim = 6
noise_std = 0.5
seed = 3

[schedule]
r_final = 0.25
t_initial = 20
t_final = 60

[train]
lr = 0.1
batch_size = 16
total_steps = 200
snapshot_every = 10
eval_every = 50
)";

ExperimentConfig small(std::vector<std::string> overrides = {}) {
  return parse_config(kSmall, overrides);
}

TEST(RunExperiment, ReportShapeAndRatioColumn) {
  const auto cfg = small();
  const auto r = run_experiment(cfg);
  ASSERT_FALSE(r.failed) << r.failure;
  ASSERT_EQ(r.per_step.size(), cfg.total_steps);
  const auto sched = cfg.effective_schedule();
  for (std::size_t i = 0; i < r.per_step.size(); ++i) {
    EXPECT_EQ(r.per_step[i].step, i + 1);
    EXPECT_EQ(r.per_step[i].ratio, ratio_at(static_cast<double>(i + 1), sched));
    EXPECT_EQ(r.per_step[i].retained, retained_count(r.per_step[i].ratio, r.prunable_count));
  }
  EXPECT_EQ(r.final_retained, retained_count(0.25, r.prunable_count));
  EXPECT_EQ(r.snapshot_steps.size(), 20u);
  EXPECT_EQ(r.eval_curve.size(), 4u);
  EXPECT_EQ(r.metric_name, "accuracy");
  for (std::size_t j = 0; j < r.final_params.size(); ++j) {
    if (r.prunable[j] && !r.final_mask[j]) EXPECT_EQ(r.final_params[j], 0.0);
  }
  for (const auto& c : consistency_checks(r)) EXPECT_TRUE(c.pass) << c.subject;
}

TEST(RunExperiment, BitIdenticalReruns) {
  const auto a = run_experiment(small());
  const auto b = run_experiment(small());
  EXPECT_EQ(a.final_params, b.final_params);
  EXPECT_EQ(a.score_snapshots, b.score_snapshots);
  EXPECT_EQ(a.mask_flips, b.mask_flips);
  std::ostringstream ca, cb;
  write_metrics_csv(ca, a);
  write_metrics_csv(cb, b);
  EXPECT_EQ(ca.str(), cb.str());
}

TEST(RunExperiment, NoPruningMatchesBaselineAndNeverFlips) {
  const auto pruned_off = run_experiment(small({"schedule.r_final=1"}));
  EXPECT_EQ(pruned_off.mask_flips, 0u);
  // The same run with a different score variant never consults the scores.
  const auto baseline = run_experiment(small({"schedule.r_final=1", "score.variant=magnitude"}));
  EXPECT_EQ(pruned_off.final_params, baseline.final_params);
  EXPECT_EQ(pruned_off.final_metric, baseline.final_metric);
  for (std::size_t i = 0; i < baseline.per_step.size(); ++i) {
    EXPECT_EQ(pruned_off.per_step[i].train_loss, baseline.per_step[i].train_loss);
  }
}

TEST(RunExperiment, SnapshotCadenceIsObservationOnly) {
  const auto a = run_experiment(small());
  const auto b = run_experiment(small({"train.snapshot_every=7"}));
  ASSERT_EQ(a.per_step.size(), b.per_step.size());
  for (std::size_t i = 0; i < a.per_step.size(); ++i) {
    EXPECT_EQ(a.per_step[i].train_loss, b.per_step[i].train_loss);
  }
  EXPECT_EQ(a.final_metric, b.final_metric);
  EXPECT_NE(a.snapshot_steps.size(), b.snapshot_steps.size());
}

TEST(RunExperiment, MagnitudeScoresAreAbsoluteWeights) {
  // Step t scores the weights it starts from, i.e. the output of step t - 1.
  const auto a = run_experiment(small({"score.variant=magnitude", "schedule.r_final=1"}));
  const auto b = run_experiment(
      small({"score.variant=magnitude", "schedule.r_final=1", "train.total_steps=199"}));
  ASSERT_EQ(a.final_scores.size(), b.final_params.size());
  for (std::size_t j = 0; j < a.final_params.size(); ++j) {
    if (a.prunable[j]) EXPECT_EQ(a.final_scores[j], std::fabs(b.final_params[j]));
  }
}

TEST(RunExperiment, StructuredMasksAreGroupConstant) {
  const auto r = run_experiment(small({"structured.groups=columns"}));
  ASSERT_FALSE(r.failed) << r.failure;
  // First layer weight is [8, 6]; a column group is one input feature.
  for (std::size_t c = 0; c < 6; ++c) {
    for (std::size_t row = 1; row < 8; ++row) {
      EXPECT_EQ(r.final_mask[row * 6 + c], r.final_mask[c]);
    }
  }
}

TEST(RunExperiment, DivergenceIsReportedNotThrown) {
  const auto r = run_experiment(small({"train.lr=1e200"}));
  EXPECT_TRUE(r.failed);
  EXPECT_FALSE(r.failure.empty());
  EXPECT_LT(r.per_step.size(), 200u);
}

TEST(VariabilityStats, ConstantAndAlternating) {
  const std::vector<std::vector<double>> constant(5, {0.3, 2.0});
  const auto c = variability_stats(constant, Transform::kLog);
  EXPECT_EQ(c.median, 0.0);
  EXPECT_EQ(c.weights_used, 2u);
  const std::vector<std::vector<double>> alt{{1.0, 4.0}, {3.0, 4.0}, {1.0, 4.0}, {3.0, 4.0}};
  const auto a = variability_stats(alt, Transform::kNone);
  EXPECT_DOUBLE_EQ(a.per_weight_std[0], 1.0);
  EXPECT_EQ(a.per_weight_std[1], 0.0);
}

TEST(VariabilityStats, LogExcludesZeros) {
  const std::vector<std::vector<double>> rows{{0.0, 1.0, 0.0}, {0.0, 2.0, 5.0}, {0.0, 4.0, 0.0}};
  const auto s = variability_stats(rows, Transform::kLog);
  EXPECT_EQ(s.weights_excluded, 2u);
  EXPECT_EQ(s.weights_used, 1u);
  EXPECT_EQ(s.zeros_excluded, 5u);
  EXPECT_TRUE(std::isnan(s.per_weight_std[0]));
  EXPECT_THROW(variability_stats({{1.0}}, Transform::kNone), Error);
}

TEST(Sweep, VariantAxisGivesOneRowPerValue) {
  const std::vector<std::string> values{"platon", "sensitivity_only", "uncertainty_only", "ratio"};
  const std::vector<std::uint64_t> seeds{0, 1};
  const auto t = sweep(small({"train.total_steps=60", "schedule.t_initial=5",
                              "schedule.t_final=20"}),
                       SweepAxis::kVariant, values, seeds, 2);
  ASSERT_EQ(t.aggregates.size(), 4u);
  ASSERT_EQ(t.rows.size(), 8u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(t.aggregates[i].value, values[i]);
    EXPECT_EQ(t.aggregates[i].runs, 2u);
    EXPECT_EQ(t.rows[2 * i].value, values[i]);
    EXPECT_EQ(t.rows[2 * i + 1].seed, 1u);
  }
}

TEST(Sweep, RatioOneMatchesPlainRun) {
  const auto base = small({"train.total_steps=60", "schedule.t_initial=5", "schedule.t_final=20"});
  const std::vector<std::string> values{"1"};
  const std::vector<std::uint64_t> seeds{0};
  const auto t = sweep(base, SweepAxis::kRatio, values, seeds, 1);
  EXPECT_EQ(t.rows[0].final_metric,
            run_experiment(small({"train.total_steps=60", "schedule.t_initial=5",
                                 "schedule.t_final=20", "schedule.r_final=1"})).final_metric);
}

TEST(Sweep, ParallelismDoesNotChangeRows) {
  const auto base = small({"train.total_steps=40", "schedule.t_initial=5", "schedule.t_final=10"});
  const std::vector<std::string> values{"0.75", "0.85"};
  const std::vector<std::uint64_t> seeds{0, 1, 2};
  const auto a = sweep(base, SweepAxis::kBeta1, values, seeds, 1);
  const auto b = sweep(base, SweepAxis::kBeta1, values, seeds, 3);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].final_metric, b.rows[i].final_metric);
  }
}

TEST(Sweep, FailedRunsBecomeRows) {
  const auto base = small({"train.total_steps=40", "schedule.t_initial=5", "schedule.t_final=10"});
  const std::vector<std::string> values{"0.1", "1e200"};
  const std::vector<std::uint64_t> seeds{0};
  // lr is not a sweep axis; sweep over ratio on a diverging regression base.
  const auto diverging = parse_config(R"(
[dataset]
input_dim = 6
[train]
lr = 1e10
batch_size = 8
total_steps = 100
)");
  const std::vector<std::string> ratios{"0.5"};
  const auto t = sweep(diverging, SweepAxis::kRatio, ratios, seeds, 1);
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_TRUE(t.rows[0].failed);
  EXPECT_EQ(t.aggregates[0].failed, 1u);
  EXPECT_THROW(sweep(base, SweepAxis::kBeta1, values, seeds, 1), ConfigError);
}

TEST(WithAxisValue, AppliesAndValidates) {
  const auto base = small();
  EXPECT_EQ(with_axis_value(base, SweepAxis::kBeta2, "0.9").score.beta2, 0.9);
  EXPECT_EQ(with_axis_value(base, SweepAxis::kVariant, "ratio").score.variant, ScoreVariant::kRatio);
  EXPECT_THROW(with_axis_value(base, SweepAxis::kRatio, "abc"), ConfigError);
  EXPECT_THROW(with_axis_value(base, SweepAxis::kRatio, "1.5"), ConfigError);
  EXPECT_THROW(parse_sweep_axis("lr"), ConfigError);
}

}  // namespace
}  // namespace ucbprune
