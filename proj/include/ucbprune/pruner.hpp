// Copyright 2026 The ucbprune Authors
// SPDX-License-Identifier: Apache-2.0

// One iteration of score-driven iterative pruning:
//
//   I     = sensitivity(theta, g)
//   state = advance(state, I)                 Ibar, U, Ubar
//   S     = score(state, theta)
//   theta = project(theta - lr * direction, top_k(S))
//
// The projection zeroes pruned entries outright. An entry that re-enters
// the mask later therefore restarts from 0 - lr * direction, never from the
// value it held before it was pruned.
//
// The step started with state.step = t produces theta^(t+1), which keeps
// retained_count(ratio_at(t + 1)) prunable entries. After the last step
// (t + 1 = T) the model sits at r_final.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ucbprune/core.hpp"
#include "ucbprune/importance.hpp"
#include "ucbprune/scheduler.hpp"

namespace ucbprune {

struct PruneStepOutput {
  ParamState params;
  PruneState state;
  Mask mask;                        // entry-level mask applied this step
  std::vector<double> scores;       // length d (entrywise) or p (structured)
  std::vector<double> sensitivity;  // instantaneous I fed into the averages
};

// Exactly k ones at the largest scores; ties go to the lower index.
// Throws RangeError if k > scores.size() and NumericError on NaN.
Mask select_topk(std::span<const double> scores, std::size_t k);

// `grad` is the raw mini-batch gradient at params and always drives the
// scores. `update_direction`, when non-empty, replaces it in the parameter
// update (momentum and similar wrappers); otherwise plain SGD is used.
PruneStepOutput prune_step(const ParamState& params, const PruneState& state,
                           std::span<const double> grad, double lr,
                           const ScheduleConfig& schedule, const ScoreConfig& config,
                           std::span<const double> update_direction = {});

// Group-wise variant: scores and top-k selection over the groups of
// `partition`; whole groups are kept or zeroed.
PruneStepOutput prune_step_structured(const ParamState& params, const PruneState& state,
                                      std::span<const double> grad, double lr,
                                      const ScheduleConfig& schedule, const ScoreConfig& config,
                                      const GroupPartition& partition,
                                      std::span<const double> update_direction = {});

}  // namespace ucbprune
