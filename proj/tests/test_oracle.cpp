// Copyright 2026 The ucbprune Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "ucbprune/error.hpp"
#include "ucbprune/importance.hpp"
#include "ucbprune/oracle.hpp"
#include "ucbprune/pruner.hpp"

namespace ucbprune {
namespace {

using Vec = std::vector<double>;

TEST(TopkBySort, Examples) {
  EXPECT_EQ(topk_by_sort(Vec{3, 1, 2}, 2), Mask({1, 0, 1}));
  EXPECT_EQ(topk_by_sort(Vec{1, 1, 1, 1}, 2), Mask({1, 1, 0, 0}));
}

TEST(TopkBySort, AgreesWithSelectTopk) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    Vec s(1 + rng() % 100);
    for (auto& v : s) v = n(rng);
    const std::size_t k = rng() % (s.size() + 1);
    ASSERT_EQ(topk_by_sort(s, k), select_topk(s, k));
  }
}

TEST(EmaDirectSum, Examples) {
  EXPECT_DOUBLE_EQ(ema_direct_sum(Vec{1}, 0.85), 0.15);
  EXPECT_EQ(ema_direct_sum(Vec(50, 0.0), 0.9), 0.0);
  EXPECT_EQ(ema_direct_sum(Vec{}, 0.9), 0.0);
}

TEST(EmaDirectSum, MatchesRecursion) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vec history(100);
  for (auto& v : history) v = u(rng);
  Vec rec{0.0};
  for (double h : history) rec = ema_update(rec, Vec{h}, 0.9);
  EXPECT_NEAR(rec[0], ema_direct_sum(history, 0.9), 1e-12);
}

TEST(TaylorResidual, QuadraticIsHalfSquare) {
  const LossFn f = [](std::span<const double> th) { return 0.5 * th[0] * th[0]; };
  const Vec theta{0.1};
  const auto r = taylor_residual(f, theta, Vec{0.1}, 0);
  EXPECT_DOUBLE_EQ(r.approx, 0.01);
  EXPECT_DOUBLE_EQ(r.exact, 0.005);
  EXPECT_DOUBLE_EQ(r.residual(), 0.005);
}

TEST(TaylorResidual, ZeroWeightAndLinearLoss) {
  const LossFn quad = [](std::span<const double> th) { return 0.5 * th[0] * th[0] + th[1]; };
  const auto zero = taylor_residual(quad, Vec{0.0, 1.0}, Vec{0.0, 1.0}, 0);
  EXPECT_EQ(zero.approx, 0.0);
  EXPECT_EQ(zero.exact, 0.0);
  const LossFn lin = [](std::span<const double> th) { return 3.0 * th[0] - 2.0 * th[1]; };
  EXPECT_NEAR(taylor_residual(lin, Vec{0.7, 0.2}, Vec{3.0, -2.0}, 0).residual(), 0.0, 1e-15);
}

TEST(TaylorResidual, ModelOverloadScalesQuadratically) {
  ModelSpec m;
  m.kind = ModelKind::kMlp;
  m.layer_sizes = {3, 4, 1};
  m.activation = Activation::kTanh;
  DatasetSpec ds;
  ds.kind = DatasetKind::kGaussianClassification;
  ds.input_dim = 3;
  const auto split = generate_dataset(ds);
  const ParamState p = init_params(m, 3, 6);
  std::vector<std::size_t> batch{0, 1, 2, 3, 4, 5, 6, 7};
  // Output-layer weights enter the logit linearly: a clean exponent of 2.
  const double slope = taylor_scaling_exponent(m, p, split.train, batch, 3 * 4 + 4);
  EXPECT_NEAR(slope, 2.0, 0.1);
}

DataSplit teacher_split(std::size_t d, double sparsity, std::uint64_t seed) {
  DatasetSpec ds;
  ds.input_dim = d;
  ds.teacher_sparsity = sparsity;
  ds.n_train = 64;
  ds.n_eval = 64;
  ds.seed = seed;
  return generate_dataset(ds);
}

TEST(ExhaustiveMaskSearch, RecoversSingleSupport) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto split = teacher_split(3, 1.0 / 3.0, seed);
    std::size_t j = 0;
    while (split.teacher[j] == 0.0) ++j;
    std::vector<std::uint8_t> expect(3, 0);
    expect[j] = 1;
    const auto r = exhaustive_mask_search(ModelSpec{}, split, 1, TrainerSettings{});
    EXPECT_EQ(r.best_mask, Mask(expect));
    EXPECT_EQ(r.candidates, 3u);
    EXPECT_LT(r.best_loss, 1e-6);
  }
}

TEST(ExhaustiveMaskSearch, EdgeCardinalities) {
  const auto split = teacher_split(4, 0.5, 1);
  EXPECT_EQ(exhaustive_mask_search(ModelSpec{}, split, 4, TrainerSettings{}).best_mask,
            Mask::ones(4));
  const auto none = exhaustive_mask_search(ModelSpec{}, split, 0, TrainerSettings{});
  EXPECT_EQ(none.best_mask, Mask::zeros(4));
  EXPECT_EQ(none.candidates, 1u);
}

TEST(ExhaustiveMaskSearch, OrderInvariant) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto split = teacher_split(6, 0.5, seed);
    const auto f = exhaustive_mask_search(ModelSpec{}, split, 2, TrainerSettings{},
                                          EnumerationOrder::kForward);
    const auto r = exhaustive_mask_search(ModelSpec{}, split, 2, TrainerSettings{},
                                          EnumerationOrder::kReverse);
    EXPECT_EQ(f.best_mask, r.best_mask);
    EXPECT_EQ(f.best_loss, r.best_loss);
    EXPECT_EQ(f.candidates, 15u);
  }
}

TEST(ExhaustiveMaskSearch, RefusesLargeModels) {
  const auto split = teacher_split(17, 0.2, 0);
  EXPECT_THROW(exhaustive_mask_search(ModelSpec{}, split, 2, TrainerSettings{}), GuardError);
  EXPECT_THROW(exhaustive_mask_search(ModelSpec{}, teacher_split(4, 0.5, 0), 5, TrainerSettings{}),
               RangeError);
}

TEST(OracleSuite, AllSubjectsPass) {
  const auto reports = run_oracle_suite(OracleSuiteOptions{});
  EXPECT_EQ(reports.size(), oracle_subjects().size());
  for (const auto& r : reports) {
    EXPECT_TRUE(r.pass) << r.subject << " error " << r.max_abs_error << " tol " << r.tolerance;
    EXPECT_GT(r.cases_checked, 0u) << r.subject;
  }
}

TEST(OracleSuite, OnlyFiltersByPrefix) {
  OracleSuiteOptions o;
  o.only = {"ema"};
  const auto reports = run_oracle_suite(o);
  ASSERT_FALSE(reports.empty());
  for (const auto& r : reports) EXPECT_EQ(r.subject.rfind("ema", 0), 0u);
}

TEST(OracleSuite, ReversedTieBreakIsCaught) {
  OracleSuiteOptions o;
  o.only = {"topk"};
  o.topk = [](std::span<const double> s, std::size_t k) {
    Vec rev(s.rbegin(), s.rend());
    const Mask m = select_topk(rev, k);
    std::vector<std::uint8_t> bits(s.size());
    for (std::size_t j = 0; j < s.size(); ++j) bits[j] = m[s.size() - 1 - j];
    return Mask(bits);
  };
  const auto reports = run_oracle_suite(o);
  ASSERT_FALSE(reports.empty());
  bool caught = false;
  for (const auto& r : reports) caught = caught || !r.pass;
  EXPECT_TRUE(caught);
}

}  // namespace
}  // namespace ucbprune
