// Copyright 2026 The ucbprune Authors
// SPDX-License-Identifier: Apache-2.0

// Cubic remaining-weights schedule with initial and final plateaus.

#pragma once

#include <cstddef>

namespace ucbprune {

struct ScheduleConfig {
  double r_initial = 1.0;
  double r_final = 0.1;
  std::size_t t_initial = 0;  // steps held at r_initial
  std::size_t t_final = 0;    // steps held at r_final before T
  std::size_t total_steps = 1;
  // Use (t - t_initial - t_final) in the cubic numerator, as the formula is
  // usually printed. That variant jumps above r_initial at t_initial and is
  // kept only for comparison.
  bool literal = false;

  void validate() const;
};

// Remaining-weights ratio at (possibly fractional) step t in [0, T].
//   t < t_i        -> r_initial
//   t >= T - t_f   -> r_final
//   otherwise      -> r_final + (r_initial - r_final) * (1 - (t - t_i) / (T - t_i - t_f))^3
double ratio_at(double t, const ScheduleConfig& config);

// ceil(r * d) clamped to [1, d].
std::size_t retained_count(double r, std::size_t d);

}  // namespace ucbprune
