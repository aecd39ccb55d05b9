// Copyright 2026 The ucbprune Authors
// SPDX-License-Identifier: Apache-2.0

#include "ucbprune/importance.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "ucbprune/error.hpp"

namespace ucbprune {

namespace {

std::string format_real(double v) {
  std::ostringstream o;
  o << v;
  return o.str();
}

void require_same_length(std::span<const double> a, std::span<const double> b, const char* what) {
  if (a.size() != b.size()) {
    throw DimensionError(std::string(what) + ": lengths " + std::to_string(a.size()) + " and " +
                         std::to_string(b.size()) + " differ");
  }
}

void require_finite(std::span<const double> v, const char* what) {
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (!std::isfinite(v[j])) {
      throw NumericError(std::string(what) + ": non-finite value at index " + std::to_string(j));
    }
  }
}

}  // namespace

std::string_view to_string(ScoreVariant v) {
  switch (v) {
    case ScoreVariant::kPlaton: return "platon";
    case ScoreVariant::kSensitivityOnly: return "sensitivity_only";
    case ScoreVariant::kUncertaintyOnly: return "uncertainty_only";
    case ScoreVariant::kRatio: return "ratio";
    case ScoreVariant::kMagnitude: return "magnitude";
  }
  return "unknown";
}

ScoreVariant parse_score_variant(std::string_view name) {
  for (auto v : {ScoreVariant::kPlaton, ScoreVariant::kSensitivityOnly,
                 ScoreVariant::kUncertaintyOnly, ScoreVariant::kRatio, ScoreVariant::kMagnitude}) {
    if (to_string(v) == name) return v;
  }
  throw ConfigError("score.variant: unknown variant '" + std::string(name) +
                    "' (expected platon, sensitivity_only, uncertainty_only, ratio or magnitude)");
}

void ScoreConfig::validate() const {
  if (!(beta1 > 0.0 && beta1 < 1.0)) {
    throw ConfigError("score.beta1 must lie in (0, 1), got " + format_real(beta1));
  }
  if (!(beta2 > 0.0 && beta2 < 1.0)) {
    throw ConfigError("score.beta2 must lie in (0, 1), got " + format_real(beta2));
  }
  if (!(ratio_epsilon > 0.0) || !std::isfinite(ratio_epsilon)) {
    throw ConfigError("score.ratio_epsilon must be a positive finite number");
  }
}

PruneState PruneState::fresh(std::size_t n, PruneMode mode) {
  PruneState s;
  s.smoothed_importance.assign(n, 0.0);
  s.smoothed_uncertainty.assign(n, 0.0);
  s.mode = mode;
  return s;
}

std::vector<double> sensitivity(std::span<const double> theta, std::span<const double> grad) {
  require_same_length(theta, grad, "sensitivity");
  require_finite(theta, "sensitivity(theta)");
  require_finite(grad, "sensitivity(grad)");
  std::vector<double> out(theta.size());
  for (std::size_t j = 0; j < theta.size(); ++j) out[j] = std::fabs(theta[j] * grad[j]);
  return out;
}

std::vector<double> group_sensitivity(std::span<const double> theta,
                                      std::span<const double> grad,
                                      const GroupPartition& partition) {
  require_same_length(theta, grad, "group_sensitivity");
  require_finite(theta, "group_sensitivity(theta)");
  require_finite(grad, "group_sensitivity(grad)");
  std::vector<double> out(partition.size());
  for (std::size_t g = 0; g < partition.size(); ++g) {
    const auto& group = partition[g];
    if (group.empty()) throw PartitionError("group " + std::to_string(g) + " is empty");
    double dot = 0.0;
    for (std::size_t j : group) {
      if (j >= theta.size()) {
        throw PartitionError("group " + std::to_string(g) + " references index " +
                             std::to_string(j) + " out of range");
      }
      dot += theta[j] * grad[j];
    }
    out[g] = std::fabs(dot);
  }
  return out;
}

std::vector<double> ema_update(std::span<const double> prev, std::span<const double> current,
                               double beta) {
  require_same_length(prev, current, "ema_update");
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw ConfigError("EMA coefficient must lie in [0, 1], got " + std::to_string(beta));
  }
  std::vector<double> out(prev.size());
  for (std::size_t j = 0; j < prev.size(); ++j) {
    out[j] = beta * prev[j] + (1.0 - beta) * current[j];
  }
  return out;
}

std::vector<double> uncertainty(std::span<const double> current,
                                std::span<const double> smoothed) {
  require_same_length(current, smoothed, "uncertainty");
  std::vector<double> out(current.size());
  for (std::size_t j = 0; j < current.size(); ++j) out[j] = std::fabs(current[j] - smoothed[j]);
  return out;
}

namespace {

std::vector<double> state_score(const PruneState& state, const ScoreConfig& config) {
  const auto& ibar = state.smoothed_importance;
  const auto& ubar = state.smoothed_uncertainty;
  require_same_length(ibar, ubar, "score(state)");
  std::vector<double> out(ibar.size());
  switch (config.variant) {
    case ScoreVariant::kPlaton:
      for (std::size_t j = 0; j < out.size(); ++j) out[j] = ibar[j] * ubar[j];
      break;
    case ScoreVariant::kSensitivityOnly:
      out = ibar;
      break;
    case ScoreVariant::kUncertaintyOnly:
      out = ubar;
      break;
    case ScoreVariant::kRatio:
      for (std::size_t j = 0; j < out.size(); ++j) {
        out[j] = ibar[j] / (ubar[j] + config.ratio_epsilon);
        if (!std::isfinite(out[j])) {
          throw NumericError("ratio score is non-finite at index " + std::to_string(j));
        }
      }
      break;
    case ScoreVariant::kMagnitude:
      break;  // handled by callers
  }
  return out;
}

}  // namespace

std::vector<double> score(const PruneState& state, std::span<const double> theta,
                          const ScoreConfig& config) {
  if (config.variant == ScoreVariant::kMagnitude) {
    std::vector<double> out(theta.size());
    for (std::size_t j = 0; j < theta.size(); ++j) out[j] = std::fabs(theta[j]);
    return out;
  }
  if (state.size() != theta.size()) {
    throw DimensionError("score: state has " + std::to_string(state.size()) +
                         " entries, theta has " + std::to_string(theta.size()));
  }
  return state_score(state, config);
}

std::vector<double> score(const PruneState& state, std::span<const double> theta,
                          const GroupPartition& partition, const ScoreConfig& config) {
  if (config.variant == ScoreVariant::kMagnitude) {
    std::vector<double> out(partition.size(), 0.0);
    for (std::size_t g = 0; g < partition.size(); ++g) {
      for (std::size_t j : partition[g]) out[g] += std::fabs(theta[j]);
    }
    return out;
  }
  if (state.size() != partition.size()) {
    throw DimensionError("score: state has " + std::to_string(state.size()) +
                         " groups, partition has " + std::to_string(partition.size()));
  }
  return state_score(state, config);
}

std::vector<double> log_form_score(std::span<const double> smoothed_importance,
                                   std::span<const double> smoothed_uncertainty, double c) {
  require_same_length(smoothed_importance, smoothed_uncertainty, "log_form_score");
  std::vector<double> out(smoothed_importance.size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = std::exp(std::log(smoothed_importance[j]) + c * std::log(smoothed_uncertainty[j]));
  }
  return out;
}

void advance(PruneState& state, std::span<const double> instantaneous, const ScoreConfig& config) {
  auto ibar = update_smoothed_importance(state.smoothed_importance, instantaneous, config.beta1);
  const auto u = uncertainty(instantaneous, ibar);
  auto ubar = update_smoothed_uncertainty(state.smoothed_uncertainty, u, config.beta2);
  state.smoothed_importance = std::move(ibar);
  state.smoothed_uncertainty = std::move(ubar);
}

}  // namespace ucbprune
