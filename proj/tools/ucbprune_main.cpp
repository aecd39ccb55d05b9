// Copyright 2026 The ucbprune Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) {
  return ucbprune::cli::main(argc, argv, std::cout, std::cerr);
}
