// Copyright 2026 The ucbprune Authors
// SPDX-License-Identifier: Apache-2.0

// The `ucbprune` command line: run, sweep, oracle, inspect.
//
// Exit codes:
//   0  success
//   2  usage error (bad flags, missing config file, empty seed list)
//   3  config validation error
//   4  run divergence / numeric failure
//   5  oracle failure

#pragma once

#include <functional>
#include <iosfwd>
#include <span>

#include "ucbprune/core.hpp"

namespace ucbprune::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitConfig = 3;
inline constexpr int kExitDiverged = 4;
inline constexpr int kExitOracle = 5;

struct Hooks {
  // Replaces select_topk inside the oracle suite (fault-injection builds).
  std::function<Mask(std::span<const double>, std::size_t)> topk;
};

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
         const Hooks& hooks = {});

}  // namespace ucbprune::cli
