// Copyright 2026 The ucbprune Authors
// SPDX-License-Identifier: Apache-2.0

#include "ucbprune/pruner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ucbprune/error.hpp"

namespace ucbprune {

Mask select_topk(std::span<const double> scores, std::size_t k) {
  const std::size_t n = scores.size();
  if (k > n) {
    throw RangeError("select_topk: k=" + std::to_string(k) + " exceeds " + std::to_string(n) +
                     " scores");
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (std::isnan(scores[j])) {
      throw NumericError("select_topk: NaN score at index " + std::to_string(j));
    }
  }
  Mask mask = Mask::zeros(n);
  if (k == 0) return mask;
  if (k == n) return Mask::ones(n);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Strict total order: higher score first, then lower index.
  const auto before = [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  };
  std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k - 1),
                   order.end(), before);
  const std::size_t pivot = order[k - 1];
  for (std::size_t j = 0; j < n; ++j) {
    if (j == pivot || before(j, pivot)) mask.set(j, true);
  }
  return mask;
}

namespace {

void check_inputs(const ParamState& params, std::span<const double> grad,
                  std::span<const double> direction, std::size_t step,
                  const ScheduleConfig& schedule) {
  if (grad.size() != params.size()) {
    throw DimensionError("prune_step: gradient has length " + std::to_string(grad.size()) +
                         ", parameters have length " + std::to_string(params.size()));
  }
  if (!direction.empty() && direction.size() != params.size()) {
    throw DimensionError("prune_step: update direction has length " +
                         std::to_string(direction.size()));
  }
  for (std::size_t j = 0; j < grad.size(); ++j) {
    if (!std::isfinite(grad[j]) || (!direction.empty() && !std::isfinite(direction[j]))) {
      throw NumericError("prune_step: non-finite gradient at index " + std::to_string(j) +
                         " (step " + std::to_string(step) + ")");
    }
  }
  if (step >= schedule.total_steps) {
    throw RangeError("prune_step: step " + std::to_string(step) + " is not below T=" +
                     std::to_string(schedule.total_steps));
  }
}

std::vector<double> sgd_values(const ParamState& params, std::span<const double> grad,
                               std::span<const double> direction, double lr) {
  const auto dir = direction.empty() ? grad : direction;
  std::vector<double> out(params.size());
  const auto theta = params.values();
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = theta[j] - lr * dir[j];
  return out;
}

}  // namespace

PruneStepOutput prune_step(const ParamState& params, const PruneState& state,
                           std::span<const double> grad, double lr,
                           const ScheduleConfig& schedule, const ScoreConfig& config,
                           std::span<const double> update_direction) {
  check_inputs(params, grad, update_direction, state.step, schedule);
  if (state.mode != PruneMode::kEntrywise || state.size() != params.size()) {
    throw DimensionError("prune_step: state must be entrywise over " +
                         std::to_string(params.size()) + " entries");
  }

  PruneStepOutput out;
  out.sensitivity = sensitivity(params.values(), grad);
  out.state = state;
  advance(out.state, out.sensitivity, config);
  out.scores = score(out.state, params.values(), config);

  const auto prunable = params.prunable_indices();
  std::vector<double> ranked(prunable.size());
  for (std::size_t i = 0; i < prunable.size(); ++i) ranked[i] = out.scores[prunable[i]];
  const double r = ratio_at(static_cast<double>(state.step + 1), schedule);
  const Mask chosen = select_topk(ranked, retained_count(r, prunable.size()));

  out.mask = Mask::ones(params.size());
  for (std::size_t i = 0; i < prunable.size(); ++i) out.mask.set(prunable[i], chosen[i]);

  out.params = apply_mask(params.with_values(sgd_values(params, grad, update_direction, lr)),
                          out.mask);
  out.state.step = state.step + 1;
  return out;
}

PruneStepOutput prune_step_structured(const ParamState& params, const PruneState& state,
                                      std::span<const double> grad, double lr,
                                      const ScheduleConfig& schedule, const ScoreConfig& config,
                                      const GroupPartition& partition,
                                      std::span<const double> update_direction) {
  check_inputs(params, grad, update_direction, state.step, schedule);
  partition.validate(params.size(), params.prunable());
  if (state.mode != PruneMode::kStructured || state.size() != partition.size()) {
    throw DimensionError("prune_step_structured: state must be structured over " +
                         std::to_string(partition.size()) + " groups");
  }

  PruneStepOutput out;
  out.sensitivity = group_sensitivity(params.values(), grad, partition);
  out.state = state;
  advance(out.state, out.sensitivity, config);
  out.scores = score(out.state, params.values(), partition, config);

  const double r = ratio_at(static_cast<double>(state.step + 1), schedule);
  const Mask groups_kept = select_topk(out.scores, retained_count(r, partition.size()));
  out.mask = expand_group_mask(groups_kept, partition, params.size());

  out.params = apply_mask(params.with_values(sgd_values(params, grad, update_direction, lr)),
                          out.mask);
  out.state.step = state.step + 1;
  return out;
}

}  // namespace ucbprune
