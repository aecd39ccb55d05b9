// Copyright 2026 The ucbprune Authors
// SPDX-License-Identifier: Apache-2.0

// Importance scores for iterative pruning.
//
// Per step, with I the instantaneous sensitivity |theta * grad|:
//
//   Ibar <- beta1 * Ibar + (1 - beta1) * I          smoothed sensitivity
//   U     = |I - Ibar|                              local temporal variation
//   Ubar <- beta2 * Ubar + (1 - beta2) * U          smoothed uncertainty
//   S     = Ibar * Ubar                             upper-confidence score
//
// Both averages start at zero and are never bias-corrected. In structured
// mode the same recursions run over groups, with I_G = |theta_G . grad_G|.

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ucbprune/core.hpp"

namespace ucbprune {

enum class ScoreVariant {
  kPlaton,           // Ibar * Ubar
  kSensitivityOnly,  // Ibar
  kUncertaintyOnly,  // Ubar
  kRatio,            // Ibar / (Ubar + eps): prunes the uncertain weights first
  kMagnitude,        // |theta|
};

std::string_view to_string(ScoreVariant v);
// Throws ConfigError on an unknown name.
ScoreVariant parse_score_variant(std::string_view name);

struct ScoreConfig {
  double beta1 = 0.85;
  double beta2 = 0.95;
  ScoreVariant variant = ScoreVariant::kPlaton;
  double ratio_epsilon = 1e-12;

  // Throws ConfigError naming the violated bound.
  void validate() const;
};

enum class PruneMode { kEntrywise, kStructured };

struct PruneState {
  std::vector<double> smoothed_importance;   // Ibar
  std::vector<double> smoothed_uncertainty;  // Ubar
  std::size_t step = 0;
  PruneMode mode = PruneMode::kEntrywise;

  // Zero-initialised state over n entries (or n groups).
  static PruneState fresh(std::size_t n, PruneMode mode = PruneMode::kEntrywise);
  std::size_t size() const { return smoothed_importance.size(); }
};

// |theta[j] * grad[j]|.
std::vector<double> sensitivity(std::span<const double> theta, std::span<const double> grad);

// |sum_{j in G_g} theta[j] * grad[j]| per group. Opposite-signed products
// inside a group cancel.
std::vector<double> group_sensitivity(std::span<const double> theta,
                                      std::span<const double> grad,
                                      const GroupPartition& partition);

// beta * prev + (1 - beta) * current. beta is checked against [0, 1] so the
// no-smoothing and frozen limits stay reachable.
std::vector<double> ema_update(std::span<const double> prev, std::span<const double> current,
                               double beta);

inline std::vector<double> update_smoothed_importance(std::span<const double> prev,
                                                      std::span<const double> current,
                                                      double beta1) {
  return ema_update(prev, current, beta1);
}

inline std::vector<double> update_smoothed_uncertainty(std::span<const double> prev,
                                                       std::span<const double> current,
                                                       double beta2) {
  return ema_update(prev, current, beta2);
}

// |current - smoothed|.
std::vector<double> uncertainty(std::span<const double> current,
                                std::span<const double> smoothed);

// Score of every entry under config.variant. `theta` is only read by the
// magnitude variant.
std::vector<double> score(const PruneState& state, std::span<const double> theta,
                          const ScoreConfig& config);

// Structured counterpart: magnitude becomes the l1 norm of each group.
std::vector<double> score(const PruneState& state, std::span<const double> theta,
                          const GroupPartition& partition, const ScoreConfig& config);

// exp(log Ibar + c log Ubar). Test hook for the log-domain form of the
// product score; with c = 1 it ranks identically to Ibar * Ubar on
// positive inputs. Not used by the pruner.
std::vector<double> log_form_score(std::span<const double> smoothed_importance,
                                   std::span<const double> smoothed_uncertainty,
                                   double c = 1.0);

// Advances `state` by one step: updates Ibar from I, then U and Ubar.
// The two averages are committed together.
void advance(PruneState& state, std::span<const double> instantaneous, const ScoreConfig& config);

}  // namespace ucbprune
