// Copyright 2026 The ucbprune Authors
// SPDX-License-Identifier: Apache-2.0

// Small differentiable models with hand-derived gradients, and the synthetic
// datasets they train on.

#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "ucbprune/core.hpp"

namespace ucbprune {

enum class ModelKind { kLinearRegression, kLogisticRegression, kMlp };
enum class Activation { kRelu, kTanh };

std::string_view to_string(ModelKind k);
std::string_view to_string(Activation a);
ModelKind parse_model_kind(std::string_view name);
Activation parse_activation(std::string_view name);

struct ModelSpec {
  ModelKind kind = ModelKind::kLinearRegression;
  std::vector<std::size_t> layer_sizes;  // mlp only: input, hidden..., output
  Activation activation = Activation::kRelu;
  double l2 = 0.0;

  void validate() const;
};

enum class DatasetKind { kSparseTeacher, kGaussianClassification, kTwoMoonsLike };

std::string_view to_string(DatasetKind k);
DatasetKind parse_dataset_kind(std::string_view name);

struct DatasetSpec {
  DatasetKind kind = DatasetKind::kSparseTeacher;
  std::size_t n_train = 256;
  std::size_t n_eval = 256;
  std::size_t input_dim = 12;
  double noise_std = 0.0;
  double teacher_sparsity = 0.2;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Dataset {
  std::size_t input_dim = 0;
  std::vector<double> features;  // row-major, size() x input_dim
  std::vector<double> targets;   // real targets, or class labels 0..num_classes-1
  bool classification = false;
  std::size_t num_classes = 0;

  std::size_t size() const { return targets.size(); }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(features).subspan(i * input_dim, input_dim);
  }
};

struct DataSplit {
  Dataset train;
  Dataset eval;
  std::vector<double> teacher;  // planted weights (sparse_teacher only)
};

// Pure in (spec): the same spec always yields the same data.
DataSplit generate_dataset(const DatasetSpec& spec);

// Parameter layout for `spec` on inputs of width input_dim, with weights
// drawn from U(-1/sqrt(fan_in), 1/sqrt(fan_in)) and zero biases.
ParamState init_params(const ModelSpec& spec, std::size_t input_dim, std::uint64_t seed);

// Throws ConfigError if the model cannot consume the dataset (wrong input
// width, classifier on a regression target, ...).
void check_compatible(const ModelSpec& spec, const Dataset& data);

struct LossGrad {
  double loss = 0.0;
  std::vector<double> grad;
};

// Mean per-sample loss over `batch` plus (l2 / 2) * ||theta||^2, and its
// exact gradient. Squared error (1/2)(f - y)^2 for regression, binary
// cross-entropy on one logit, or softmax cross-entropy on several.
LossGrad loss_and_grad(const ModelSpec& spec, const ParamState& params, const Dataset& data,
                       std::span<const std::size_t> batch);
LossGrad loss_and_grad(const ModelSpec& spec, const ParamState& params, const Dataset& data);

// Loss without the gradient pass.
double loss_value(const ModelSpec& spec, std::span<const double> theta, const ParamState& layout,
                  const Dataset& data, std::span<const std::size_t> batch);

// Accuracy in [0, 1] for classification data, mean squared error otherwise.
double evaluate(const ModelSpec& spec, const ParamState& params, const Dataset& data);

// Endless stream of mini-batches. Each epoch is a fresh uniform shuffle;
// a trailing partial batch is dropped so every batch has batch_size rows.
class BatchStream {
 public:
  BatchStream(std::size_t n, std::size_t batch_size, std::uint64_t seed);
  std::vector<std::size_t> next();

 private:
  void reshuffle();

  std::size_t batch_size_;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
  std::mt19937_64 rng_;
};

// Deterministic seed derivation so independent consumers of one config seed
// never share a random stream.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace ucbprune
