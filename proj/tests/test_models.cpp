// Copyright 2026 The ucbprune Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "ucbprune/error.hpp"
#include "ucbprune/models.hpp"
#include "ucbprune/oracle.hpp"

namespace ucbprune {
namespace {

using Vec = std::vector<double>;

ModelSpec linear() { return ModelSpec{}; }

ModelSpec logistic() {
  ModelSpec m;
  m.kind = ModelKind::kLogisticRegression;
  return m;
}

ModelSpec mlp(std::vector<std::size_t> sizes, Activation a = Activation::kTanh) {
  ModelSpec m;
  m.kind = ModelKind::kMlp;
  m.layer_sizes = std::move(sizes);
  m.activation = a;
  return m;
}

std::vector<std::size_t> all_rows(const Dataset& d) {
  std::vector<std::size_t> idx(d.size());
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

TEST(LossAndGrad, SingleSampleLinear) {
  Dataset d;
  d.input_dim = 1;
  d.features = {1.0};
  d.targets = {0.0};
  const ParamState p(Vec{2.0}, {{"weight", {1, 1}}});
  const auto lg = loss_and_grad(linear(), p, d);
  EXPECT_EQ(lg.loss, 2.0);
  EXPECT_EQ(lg.grad, (Vec{2.0}));
}

TEST(LossAndGrad, L2TermCoversAllParameters) {
  Dataset d;
  d.input_dim = 1;
  d.features = {1.0};
  d.targets = {0.0};
  ModelSpec m = linear();
  m.l2 = 0.5;
  const ParamState p(Vec{2.0}, {{"weight", {1, 1}}});
  const auto lg = loss_and_grad(m, p, d);
  EXPECT_DOUBLE_EQ(lg.loss, 2.0 + 0.25 * 4.0);
  EXPECT_DOUBLE_EQ(lg.grad[0], 2.0 + 1.0);
}

TEST(LossAndGrad, TeacherWeightsGiveZeroLoss) {
  DatasetSpec ds;
  ds.input_dim = 12;
  ds.teacher_sparsity = 0.25;
  ds.seed = 4;
  const auto split = generate_dataset(ds);
  ASSERT_EQ(split.teacher.size(), 12u);
  std::size_t support = 0;
  for (double w : split.teacher) support += w != 0.0;
  EXPECT_EQ(support, 3u);
  const ParamState p(split.teacher, {{"weight", {1, 12}}});
  EXPECT_EQ(loss_and_grad(linear(), p, split.train).loss, 0.0);
  EXPECT_EQ(evaluate(linear(), p, split.eval), 0.0);
}

TEST(LossAndGrad, MlpMatchesFiniteDifferences) {
  for (auto act : {Activation::kTanh, Activation::kRelu}) {
    for (std::size_t out : {1u, 3u}) {
      const ModelSpec m = mlp({2, 3, out}, act);
      DatasetSpec ds;
      ds.kind = DatasetKind::kGaussianClassification;
      ds.input_dim = 2;
      ds.n_train = 4;
      ds.seed = 3;
      auto split = generate_dataset(ds);
      if (out == 3) {
        for (auto& t : split.train.targets) t = static_cast<double>(static_cast<int>(t) % 3);
        split.train.num_classes = 3;
      }
      const ParamState p = init_params(m, 2, 8);
      const auto batch = all_rows(split.train);
      const auto lg = loss_and_grad(m, p, split.train, batch);
      const LossFn f = [&](std::span<const double> th) {
        return loss_value(m, th, p, split.train, batch);
      };
      const auto fd = finite_difference_gradient(f, p.values());
      EXPECT_LT(relative_error(lg.grad, fd), 1e-6);
      EXPECT_DOUBLE_EQ(f(p.values()), lg.loss);
    }
  }
}

TEST(LossAndGrad, BatchGradientsCombineLinearly) {
  const ModelSpec m = mlp({5, 4, 2});
  DatasetSpec ds;
  ds.kind = DatasetKind::kGaussianClassification;
  ds.input_dim = 5;
  ds.n_train = 20;
  const auto split = generate_dataset(ds);
  const ParamState p = init_params(m, 5, 2);
  const std::vector<std::size_t> a{0, 1, 2, 3, 4, 5, 6}, b{7, 8, 9, 10, 11, 12, 13, 14, 15};
  std::vector<std::size_t> both = a;
  both.insert(both.end(), b.begin(), b.end());
  const auto ga = loss_and_grad(m, p, split.train, a);
  const auto gb = loss_and_grad(m, p, split.train, b);
  const auto gab = loss_and_grad(m, p, split.train, both);
  const double wa = static_cast<double>(a.size()) / both.size();
  const double wb = static_cast<double>(b.size()) / both.size();
  for (std::size_t j = 0; j < p.size(); ++j) {
    EXPECT_NEAR(gab.grad[j], wa * ga.grad[j] + wb * gb.grad[j], 1e-12);
  }
}

TEST(LossAndGrad, Errors) {
  Dataset d;
  d.input_dim = 1;
  d.features = {1.0};
  d.targets = {0.0};
  const ParamState p(Vec{2.0}, {{"weight", {1, 1}}});
  EXPECT_THROW(loss_and_grad(linear(), p, d, std::vector<std::size_t>{}), Error);
  EXPECT_THROW(loss_and_grad(linear(), p, d, std::vector<std::size_t>{3}), RangeError);
  const ParamState bad(Vec{NAN}, {{"weight", {1, 1}}});
  EXPECT_THROW(loss_and_grad(linear(), bad, d), NumericError);
}

TEST(CheckCompatible, RejectsMismatches) {
  DatasetSpec ds;
  ds.input_dim = 4;
  const auto reg = generate_dataset(ds);
  EXPECT_THROW(check_compatible(logistic(), reg.train), ConfigError);
  EXPECT_THROW(check_compatible(mlp({3, 2, 1}), reg.train), ConfigError);
  EXPECT_NO_THROW(check_compatible(mlp({4, 2, 1}), reg.train));
}

TEST(GenerateDataset, DeterministicUnderSeed) {
  for (auto kind : {DatasetKind::kSparseTeacher, DatasetKind::kGaussianClassification,
                    DatasetKind::kTwoMoonsLike}) {
    DatasetSpec ds;
    ds.kind = kind;
    ds.noise_std = 0.1;
    const auto a = generate_dataset(ds);
    const auto b = generate_dataset(ds);
    EXPECT_EQ(a.train.features, b.train.features);
    EXPECT_EQ(a.eval.targets, b.eval.targets);
    ds.seed = 1;
    EXPECT_NE(generate_dataset(ds).train.features, a.train.features);
  }
}

TEST(BatchStream, FullBatchEpochs) {
  BatchStream s(10, 10, 3);
  for (int e = 0; e < 3; ++e) {
    auto b = s.next();
    std::sort(b.begin(), b.end());
    EXPECT_EQ(b, (std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9}));
  }
}

TEST(BatchStream, SameSeedSameBatches) {
  BatchStream a(100, 7, 42), b(100, 7, 42);
  for (int i = 0; i < 50; ++i) EXPECT_EQ(a.next(), b.next());
}

TEST(BatchStream, DifferentSeedsDiffer) {
  int differ = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    BatchStream a(256, 32, s), b(256, 32, s + 1000);
    differ += a.next() != b.next();
  }
  EXPECT_EQ(differ, 100);
}

TEST(BatchStream, EpochCoversEachRowOnceAndDropsTail) {
  BatchStream s(10, 3, 1);
  std::multiset<std::size_t> seen;
  for (int i = 0; i < 3; ++i) {
    for (auto j : s.next()) seen.insert(j);
  }
  EXPECT_EQ(seen.size(), 9u);
  for (auto j : seen) EXPECT_EQ(seen.count(j), 1u);
  EXPECT_THROW(BatchStream(5, 6, 0), ConfigError);
  EXPECT_THROW(BatchStream(5, 0, 0), ConfigError);
}

TEST(Evaluate, ZeroParamsGiveTargetVariance) {
  DatasetSpec ds;
  ds.noise_std = 0.3;
  const auto split = generate_dataset(ds);
  const ParamState p(Vec(ds.input_dim, 0.0), {{"weight", {1, ds.input_dim}}});
  double mean_sq = 0.0;
  for (double y : split.eval.targets) mean_sq += y * y;
  mean_sq /= static_cast<double>(split.eval.size());
  EXPECT_NEAR(evaluate(linear(), p, split.eval), mean_sq, 1e-12);
}

TEST(Evaluate, PerfectSeparatorScoresOne) {
  Dataset d;
  d.input_dim = 1;
  d.features = {-2.0, -0.5, 0.5, 3.0};
  d.targets = {0, 0, 1, 1};
  d.classification = true;
  d.num_classes = 2;
  const ParamState p(Vec{1.0, 0.0}, {{"weight", {1, 1}}, {"bias", {1}}});
  EXPECT_EQ(evaluate(logistic(), p, d), 1.0);
}

TEST(Evaluate, LogisticAccuracyMatchesDirectCount) {
  DatasetSpec ds;
  ds.kind = DatasetKind::kGaussianClassification;
  ds.input_dim = 6;
  ds.noise_std = 0.8;
  ds.seed = 12;
  const auto split = generate_dataset(ds);
  const ParamState p = init_params(logistic(), 6, 5);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < split.eval.size(); ++i) {
    double z = p.values()[6];
    for (std::size_t k = 0; k < 6; ++k) z += p.values()[k] * split.eval.row(i)[k];
    const double predicted = z > 0.0 ? 1.0 : 0.0;
    correct += predicted == split.eval.targets[i];
  }
  EXPECT_NEAR(evaluate(logistic(), p, split.eval),
              static_cast<double>(correct) / static_cast<double>(split.eval.size()), 1e-12);
}

TEST(InitParams, LayoutAndRange) {
  const ParamState p = init_params(mlp({4, 3, 2}), 4, 1);
  EXPECT_EQ(p.size(), 4u * 3 + 3 + 3 * 2 + 2);
  EXPECT_EQ(p.prunable_count(), 4u * 3 + 3 * 2);
  for (std::size_t j = 0; j < 12; ++j) EXPECT_LE(std::fabs(p.values()[j]), 0.5);
  EXPECT_EQ(init_params(mlp({4, 3, 2}), 4, 1).values().size(), p.size());
  EXPECT_THROW(mlp({4}).validate(), ConfigError);
}

TEST(DeriveSeed, StreamsDiffer) {
  EXPECT_NE(derive_seed(0, 1), derive_seed(0, 2));
  EXPECT_NE(derive_seed(0, 1), derive_seed(1, 1));
  EXPECT_EQ(derive_seed(5, 2), derive_seed(5, 2));
}

}  // namespace
}  // namespace ucbprune
