// Copyright 2026 The ucbprune Authors
// SPDX-License-Identifier: Apache-2.0

// Brute-force references. Nothing here shares a code path with the
// implementation it checks: top-k is a full stable sort, the EMA is a direct
// weighted sum, gradients are central differences, and the mask search
// enumerates every support.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ucbprune/core.hpp"
#include "ucbprune/models.hpp"

namespace ucbprune {

struct OracleReport {
  std::string subject;
  double max_abs_error = 0.0;
  double tolerance = 0.0;
  std::size_t cases_checked = 0;
  bool pass = false;  // max_abs_error <= tolerance
};

// Top-k by stable descending sort on (value, -index).
Mask topk_by_sort(std::span<const double> scores, std::size_t k);

// (1 - beta) * sum_k beta^(t-k) * history[k], evaluated in extended
// precision, t = history.size().
double ema_direct_sum(std::span<const double> history, double beta);

using LossFn = std::function<double(std::span<const double>)>;

// Central differences with step h.
std::vector<double> finite_difference_gradient(const LossFn& loss, std::span<const double> theta,
                                               double h = 1e-5);

// ||a - b|| / max(||a||, ||b||), with a floor on the denominator.
double relative_error(std::span<const double> a, std::span<const double> b);

struct TaylorResidual {
  double approx = 0.0;  // |theta_j * dL/dtheta_j|
  double exact = 0.0;   // |L(theta) - L(theta with theta_j = 0)|
  double residual() const { return approx > exact ? approx - exact : exact - approx; }
};

TaylorResidual taylor_residual(const LossFn& loss, std::span<const double> theta,
                               std::span<const double> grad, std::size_t j);
TaylorResidual taylor_residual(const ModelSpec& spec, const ParamState& params,
                               const Dataset& data, std::span<const std::size_t> batch,
                               std::size_t j);

// Least-squares slope of log(residual) against log(scale) when theta_j is
// multiplied by each scale in turn. First-order accuracy gives slope 2.
double taylor_scaling_exponent(const ModelSpec& spec, const ParamState& params,
                               const Dataset& data, std::span<const std::size_t> batch,
                               std::size_t j,
                               std::span<const double> scales = std::span<const double>());

struct TrainerSettings {
  std::size_t steps = 400;
  double lr = 0.1;
  std::uint64_t seed = 0;  // initialisation seed
};

enum class EnumerationOrder { kForward, kReverse };

struct MaskSearchResult {
  Mask best_mask;
  double best_loss = 0.0;
  std::size_t candidates = 0;
};

// Trains every k-subset of the prunable entries with full-batch projected
// gradient descent from one fixed initialisation and returns the support
// with the lowest eval loss. Ties prefer the lexicographically larger bit
// vector (lower indices kept). Refuses more than 16 prunable entries.
MaskSearchResult exhaustive_mask_search(const ModelSpec& spec, const DataSplit& data,
                                        std::size_t k, const TrainerSettings& settings,
                                        EnumerationOrder order = EnumerationOrder::kForward);

// Full oracle suite as run by `ucbprune oracle`.
struct OracleSuiteOptions {
  // Subject prefixes to keep ("ema" keeps ema.importance and ema.uncertainty).
  // Empty keeps everything.
  std::vector<std::string> only;
  // Implementation under test for the top-k cross-check.
  std::function<Mask(std::span<const double>, std::size_t)> topk;
  std::uint64_t seed = 1234;
};

std::vector<OracleReport> run_oracle_suite(const OracleSuiteOptions& options);

// All subject names the suite knows, in execution order.
std::vector<std::string> oracle_subjects();

}  // namespace ucbprune
