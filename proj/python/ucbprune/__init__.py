# Copyright 2026 The ucbprune Authors
# SPDX-License-Identifier: Apache-2.0
"""Uncertainty-aware iterative pruning on small models."""

from ._ucbprune import (
    ConfigError,
    DimensionError,
    Error,
    GuardError,
    NumericError,
    PartitionError,
    PruneState,
    RangeError,
    ScheduleConfig,
    ScoreConfig,
    __version__,
    ema_direct_sum,
    ema_update,
    prune_step,
    ratio_at,
    resolve_config,
    retained_count,
    run_experiment,
    run_oracle_suite,
    score,
    select_topk,
    sensitivity,
    topk_by_sort,
    uncertainty,
)

__all__ = [
    "ConfigError",
    "DimensionError",
    "Error",
    "GuardError",
    "NumericError",
    "PartitionError",
    "PruneState",
    "RangeError",
    "ScheduleConfig",
    "ScoreConfig",
    "__version__",
    "ema_direct_sum",
    "ema_update",
    "prune_step",
    "ratio_at",
    "resolve_config",
    "retained_count",
    "run_experiment",
    "run_oracle_suite",
    "score",
    "select_topk",
    "sensitivity",
    "topk_by_sort",
    "uncertainty",
]
