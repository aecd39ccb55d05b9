// Copyright 2026 The ucbprune Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace ucbprune {

// Root of every error thrown by the library. The CLI maps subclasses onto
// exit codes, so new error kinds should derive from one of these.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Vector or matrix lengths disagree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// NaN/Inf encountered in inputs, losses or gradients.
class NumericError : public Error {
 public:
  using Error::Error;
};

// A configuration value violates its documented bound.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Group partition is malformed (empty group, overlap, out-of-range index).
class PartitionError : public Error {
 public:
  using Error::Error;
};

// Argument outside its admissible range (k > n, step > T, ...).
class RangeError : public Error {
 public:
  using Error::Error;
};

// Brute-force oracle refused an input that is too large to enumerate.
class GuardError : public Error {
 public:
  using Error::Error;
};

}  // namespace ucbprune
