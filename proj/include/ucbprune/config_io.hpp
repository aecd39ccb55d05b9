// Copyright 2026 The ucbprune Authors
// SPDX-License-Identifier: Apache-2.0

// Experiment config files: INI text with one section per sub-config.
//
//   [model]     kind, layer_sizes, activation, l2
//   [dataset]   kind, n_train, n_eval, input_dim, noise_std, teacher_sparsity, seed
//   [schedule]  r_initial, r_final, t_initial, t_final, literal
//   [score]     variant, beta1, beta2, ratio_epsilon
//   [train]     lr, momentum, batch_size, total_steps, seed, snapshot_every, eval_every
//   [structured] groups
//
// Overrides use the dotted form `section.key=value` and are applied after
// the file is read. Unknown keys are errors.

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "ucbprune/experiments.hpp"

namespace ucbprune {

ExperimentConfig parse_config(std::string_view text,
                              std::span<const std::string> overrides = {});
ExperimentConfig load_config(const std::filesystem::path& path,
                             std::span<const std::string> overrides = {});

// Every recognised key in `section.key` form.
std::vector<std::string> config_keys();

// Canonical INI text; parse_config(to_ini(c)) reproduces c (minus overrides).
std::string to_ini(const ExperimentConfig& config);

nlohmann::ordered_json config_to_json(const ExperimentConfig& config);

// Shortest text that reads back to the same double.
std::string format_double(double v);

}  // namespace ucbprune
