// Copyright 2026 The ucbprune Authors
// SPDX-License-Identifier: Apache-2.0

#include "ucbprune/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ucbprune/error.hpp"

namespace ucbprune {

void ScheduleConfig::validate() const {
  if (!(r_final > 0.0 && r_final <= 1.0)) {
    throw ConfigError("schedule.r_final must lie in (0, 1], got " + std::to_string(r_final));
  }
  if (!(r_initial > 0.0 && r_initial <= 1.0)) {
    throw ConfigError("schedule.r_initial must lie in (0, 1], got " + std::to_string(r_initial));
  }
  if (r_final > r_initial) {
    throw ConfigError("schedule.r_final (" + std::to_string(r_final) +
                      ") must not exceed schedule.r_initial (" + std::to_string(r_initial) + ")");
  }
  if (t_initial + t_final >= total_steps) {
    throw ConfigError("schedule warmups t_initial + t_final (" +
                      std::to_string(t_initial + t_final) + ") must be below total_steps (" +
                      std::to_string(total_steps) + ")");
  }
}

double ratio_at(double t, const ScheduleConfig& config) {
  config.validate();
  const double T = static_cast<double>(config.total_steps);
  const double ti = static_cast<double>(config.t_initial);
  const double tf = static_cast<double>(config.t_final);
  if (!(t >= 0.0 && t <= T)) {
    throw RangeError("schedule step " + std::to_string(t) + " outside [0, " +
                     std::to_string(config.total_steps) + "]");
  }
  // r_f + (r_0 - r_f) * 1 can miss r_0 by an ulp; pin the knot. The literal
  // form keeps its jump at t_i.
  if (t < ti || (t == ti && !config.literal)) return config.r_initial;
  if (t >= T - tf) return config.r_final;
  const double span = T - ti - tf;
  const double progress = config.literal ? (t - ti - tf) / span : (t - ti) / span;
  const double rest = 1.0 - progress;
  return config.r_final + (config.r_initial - config.r_final) * rest * rest * rest;
}

std::size_t retained_count(double r, std::size_t d) {
  if (d == 0) return 0;
  const double x = r * static_cast<double>(d);
  // Products such as 0.7 * 10 land one ulp above the integer; do not let
  // that push the ceiling up by a whole entry.
  const double guarded = x - 1e-9 * std::max(1.0, x);
  const double k = std::ceil(guarded);
  if (!(k >= 1.0)) return 1;
  if (k >= static_cast<double>(d)) return d;
  return static_cast<std::size_t>(k);
}

}  // namespace ucbprune
