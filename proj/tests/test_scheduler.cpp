// Copyright 2026 The ucbprune Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "ucbprune/error.hpp"
#include "ucbprune/scheduler.hpp"

namespace ucbprune {
namespace {

ScheduleConfig cfg(double r0, double r1, std::size_t ti, std::size_t tf, std::size_t T) {
  ScheduleConfig c;
  c.r_initial = r0;
  c.r_final = r1;
  c.t_initial = ti;
  c.t_final = tf;
  c.total_steps = T;
  return c;
}

TEST(RatioAt, Plateaus) {
  const auto c = cfg(1.0, 0.2, 10, 20, 100);
  EXPECT_EQ(ratio_at(0, c), 1.0);
  EXPECT_EQ(ratio_at(10, c), 1.0);
  EXPECT_EQ(ratio_at(80, c), 0.2);
  EXPECT_EQ(ratio_at(100, c), 0.2);
}

TEST(RatioAt, CubicMidpoint) {
  EXPECT_DOUBLE_EQ(ratio_at(5, cfg(1.0, 0.1, 0, 0, 10)), 0.1 + 0.9 * 0.125);
  EXPECT_DOUBLE_EQ(ratio_at(5, cfg(1.0, 0.1, 0, 0, 10)), 0.2125);
}

TEST(RatioAt, OutOfRangeAndInvalidConfig) {
  EXPECT_THROW(ratio_at(-1, cfg(1, 0.1, 0, 0, 10)), RangeError);
  EXPECT_THROW(ratio_at(11, cfg(1, 0.1, 0, 0, 10)), RangeError);
  EXPECT_THROW(ratio_at(1, cfg(0.1, 0.5, 0, 0, 10)), ConfigError);
  EXPECT_THROW(ratio_at(1, cfg(1, 0.0, 0, 0, 10)), ConfigError);
  EXPECT_THROW(ratio_at(1, cfg(1, 0.1, 6, 5, 10)), ConfigError);
}

TEST(RatioAt, NonincreasingAndContinuous) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t T = 50 + rng() % 3000;
    const std::size_t ti = rng() % (T / 3);
    const std::size_t tf = rng() % (T / 3);
    const double r1 = 0.01 + 0.9 * std::uniform_real_distribution<double>()(rng);
    const auto c = cfg(1.0, r1, ti, tf, T);
    double prev = ratio_at(0, c);
    for (int i = 1; i <= 5000; ++i) {
      const double t = static_cast<double>(T) * i / 5000.0;
      const double r = ratio_at(t, c);
      EXPECT_LE(r, prev);
      EXPECT_LE(prev - r, 3.0 * (1.0 - r1) * static_cast<double>(T) / 5000.0 /
                              static_cast<double>(T - ti - tf) + 1e-12);
      prev = r;
    }
    EXPECT_EQ(ratio_at(static_cast<double>(ti), c), 1.0);
    EXPECT_EQ(ratio_at(static_cast<double>(T - tf), c), r1);
  }
}

TEST(RatioAt, LiteralFormJumpsAtWarmupEnd) {
  auto c = cfg(1.0, 0.1, 100, 200, 1000);
  c.literal = true;
  const double before = ratio_at(99.999, c);
  const double after = ratio_at(100.001, c);
  EXPECT_EQ(before, 1.0);
  EXPECT_GT(after, 1.5);
}

TEST(RetainedCount, Examples) {
  EXPECT_EQ(retained_count(2.0 / 3.0, 3), 2u);
  EXPECT_EQ(retained_count(0.1, 12), 2u);
  EXPECT_EQ(retained_count(1.0, 7), 7u);
  EXPECT_EQ(retained_count(0.1, 100), 10u);
  EXPECT_EQ(retained_count(1e-9, 5), 1u);
}

TEST(RetainedCount, NondecreasingAndPositive) {
  for (std::size_t d : {1u, 2u, 7u, 100u, 384u}) {
    std::size_t prev = 0;
    for (int i = 1; i <= 1000; ++i) {
      const std::size_t k = retained_count(i / 1000.0, d);
      EXPECT_GE(k, 1u);
      EXPECT_GE(k, prev);
      EXPECT_LE(k, d);
      prev = k;
    }
  }
}

}  // namespace
}  // namespace ucbprune
