// Copyright 2026 The ucbprune Authors
// SPDX-License-Identifier: Apache-2.0

#include "ucbprune/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "ucbprune/error.hpp"

namespace ucbprune {

std::string_view to_string(ModelKind k) {
  switch (k) {
    case ModelKind::kLinearRegression: return "linear_regression";
    case ModelKind::kLogisticRegression: return "logistic_regression";
    case ModelKind::kMlp: return "mlp";
  }
  return "unknown";
}

std::string_view to_string(Activation a) {
  return a == Activation::kRelu ? "relu" : "tanh";
}

std::string_view to_string(DatasetKind k) {
  switch (k) {
    case DatasetKind::kSparseTeacher: return "sparse_teacher";
    case DatasetKind::kGaussianClassification: return "gaussian_classification";
    case DatasetKind::kTwoMoonsLike: return "two_moons_like";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
  for (auto k : {ModelKind::kLinearRegression, ModelKind::kLogisticRegression, ModelKind::kMlp}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("model.kind: unknown kind '" + std::string(name) + "'");
}

Activation parse_activation(std::string_view name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "tanh") return Activation::kTanh;
  throw ConfigError("model.activation: unknown activation '" + std::string(name) + "'");
}

DatasetKind parse_dataset_kind(std::string_view name) {
  for (auto k : {DatasetKind::kSparseTeacher, DatasetKind::kGaussianClassification,
                 DatasetKind::kTwoMoonsLike}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("dataset.kind: unknown kind '" + std::string(name) + "'");
}

void ModelSpec::validate() const {
  if (!(l2 >= 0.0) || !std::isfinite(l2)) throw ConfigError("model.l2 must be >= 0");
  if (kind == ModelKind::kMlp) {
    if (layer_sizes.size() < 2) {
      throw ConfigError("model.layer_sizes needs at least 2 entries for an mlp");
    }
    for (std::size_t s : layer_sizes) {
      if (s == 0) throw ConfigError("model.layer_sizes entries must be positive");
    }
  }
}

void DatasetSpec::validate() const {
  if (n_train == 0 || n_eval == 0) throw ConfigError("dataset.n_train and n_eval must be positive");
  if (input_dim == 0) throw ConfigError("dataset.input_dim must be positive");
  if (!(noise_std >= 0.0) || !std::isfinite(noise_std)) {
    throw ConfigError("dataset.noise_std must be >= 0");
  }
  if (!(teacher_sparsity > 0.0 && teacher_sparsity <= 1.0)) {
    throw ConfigError("dataset.teacher_sparsity must lie in (0, 1]");
  }
  if (kind == DatasetKind::kTwoMoonsLike && input_dim < 2) {
    throw ConfigError("dataset.input_dim must be >= 2 for two_moons_like");
  }
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

namespace {

constexpr std::uint64_t kStreamTeacher = 1;
constexpr std::uint64_t kStreamTrain = 2;
constexpr std::uint64_t kStreamEval = 3;

std::size_t informative_count(const DatasetSpec& spec) {
  const auto s = static_cast<std::size_t>(
      std::lround(spec.teacher_sparsity * static_cast<double>(spec.input_dim)));
  return std::clamp<std::size_t>(s, 1, spec.input_dim);
}

// Planted directions shared by the train and eval halves.
struct Planted {
  std::vector<double> weights;
};

Planted plant(const DatasetSpec& spec) {
  std::mt19937_64 rng(derive_seed(spec.seed, kStreamTeacher));
  std::vector<std::size_t> idx(spec.input_dim);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::shuffle(idx.begin(), idx.end(), rng);
  const std::size_t s = informative_count(spec);
  Planted p;
  p.weights.assign(spec.input_dim, 0.0);
  std::uniform_real_distribution<double> mag(1.0, 2.0);
  std::bernoulli_distribution sign(0.5);
  for (std::size_t i = 0; i < s; ++i) {
    const double m = mag(rng);
    p.weights[idx[i]] = sign(rng) ? m : -m;
  }
  return p;
}

Dataset sample(const DatasetSpec& spec, const Planted& planted, std::size_t n,
               std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Dataset d;
  d.input_dim = spec.input_dim;
  d.features.resize(n * spec.input_dim);
  d.targets.resize(n);
  switch (spec.kind) {
    case DatasetKind::kSparseTeacher: {
      for (std::size_t i = 0; i < n; ++i) {
        double y = 0.0;
        for (std::size_t k = 0; k < spec.input_dim; ++k) {
          const double x = normal(rng);
          d.features[i * spec.input_dim + k] = x;
          y += planted.weights[k] * x;
        }
        d.targets[i] = y + spec.noise_std * normal(rng);
      }
      break;
    }
    case DatasetKind::kGaussianClassification: {
      // Class means +/- mu along the planted direction, normalised so the
      // class separation does not depend on the number of informative dims.
      double norm = 0.0;
      for (double w : planted.weights) norm += w * w;
      norm = std::sqrt(norm);
      d.classification = true;
      d.num_classes = 2;
      std::bernoulli_distribution label(0.5);
      for (std::size_t i = 0; i < n; ++i) {
        const bool positive = label(rng);
        const double side = positive ? 1.0 : -1.0;
        for (std::size_t k = 0; k < spec.input_dim; ++k) {
          d.features[i * spec.input_dim + k] =
              side * planted.weights[k] / norm + spec.noise_std * normal(rng);
        }
        d.targets[i] = positive ? 1.0 : 0.0;
      }
      break;
    }
    case DatasetKind::kTwoMoonsLike: {
      d.classification = true;
      d.num_classes = 2;
      std::bernoulli_distribution label(0.5);
      std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
      for (std::size_t i = 0; i < n; ++i) {
        const bool upper = label(rng);
        const double t = angle(rng);
        double* row = &d.features[i * spec.input_dim];
        if (upper) {
          row[0] = std::cos(t);
          row[1] = std::sin(t);
        } else {
          row[0] = 1.0 - std::cos(t);
          row[1] = 0.5 - std::sin(t);
        }
        row[0] += spec.noise_std * normal(rng);
        row[1] += spec.noise_std * normal(rng);
        for (std::size_t k = 2; k < spec.input_dim; ++k) row[k] = normal(rng);
        d.targets[i] = upper ? 1.0 : 0.0;
      }
      break;
    }
  }
  return d;
}

}  // namespace

DataSplit generate_dataset(const DatasetSpec& spec) {
  spec.validate();
  const Planted planted = plant(spec);
  DataSplit split;
  split.train = sample(spec, planted, spec.n_train, derive_seed(spec.seed, kStreamTrain));
  split.eval = sample(spec, planted, spec.n_eval, derive_seed(spec.seed, kStreamEval));
  if (spec.kind == DatasetKind::kSparseTeacher) split.teacher = planted.weights;
  return split;
}

namespace {

struct Layer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::size_t w_off = 0;
  std::size_t b_off = 0;
  bool has_bias = false;
};

std::vector<std::size_t> widths(const ModelSpec& spec, std::size_t input_dim) {
  switch (spec.kind) {
    case ModelKind::kLinearRegression:
    case ModelKind::kLogisticRegression:
      return {input_dim, 1};
    case ModelKind::kMlp:
      return spec.layer_sizes;
  }
  return {};
}

std::vector<TensorShape> layout_shapes(const ModelSpec& spec, std::size_t input_dim) {
  const auto w = widths(spec, input_dim);
  std::vector<TensorShape> shapes;
  if (spec.kind == ModelKind::kLinearRegression) {
    shapes.push_back({"weight", {1, input_dim}});
  } else if (spec.kind == ModelKind::kLogisticRegression) {
    shapes.push_back({"weight", {1, input_dim}});
    shapes.push_back({"bias", {1}});
  } else {
    for (std::size_t l = 0; l + 1 < w.size(); ++l) {
      shapes.push_back({"layer" + std::to_string(l) + ".weight", {w[l + 1], w[l]}});
      shapes.push_back({"layer" + std::to_string(l) + ".bias", {w[l + 1]}});
    }
  }
  return shapes;
}

std::vector<Layer> layers_of(const ModelSpec& spec, std::size_t input_dim) {
  const auto w = widths(spec, input_dim);
  std::vector<Layer> layers;
  std::size_t off = 0;
  const bool bias = spec.kind != ModelKind::kLinearRegression;
  for (std::size_t l = 0; l + 1 < w.size(); ++l) {
    Layer layer;
    layer.in = w[l];
    layer.out = w[l + 1];
    layer.w_off = off;
    off += layer.in * layer.out;
    layer.has_bias = bias;
    layer.b_off = off;
    if (bias) off += layer.out;
    layers.push_back(layer);
  }
  return layers;
}

std::size_t input_width(const ModelSpec& spec, const ParamState& params) {
  if (spec.kind == ModelKind::kMlp) return spec.layer_sizes.front();
  return params.shapes().front().dims[1];
}

double activate(Activation a, double z) {
  return a == Activation::kRelu ? (z > 0.0 ? z : 0.0) : std::tanh(z);
}

double activate_grad(Activation a, double z, double act) {
  return a == Activation::kRelu ? (z > 0.0 ? 1.0 : 0.0) : 1.0 - act * act;
}

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::fabs(z))); }

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Forward pass for one sample. pre[l] holds layer l's pre-activation,
// post[l] its input (post[0] = x).
struct Trace {
  std::vector<std::vector<double>> pre;
  std::vector<std::vector<double>> post;
};

void forward(const ModelSpec& spec, const std::vector<Layer>& layers,
             std::span<const double> theta, std::span<const double> x, Trace& tr) {
  tr.pre.resize(layers.size());
  tr.post.resize(layers.size());
  tr.post[0].assign(x.begin(), x.end());
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const Layer& L = layers[l];
    auto& z = tr.pre[l];
    z.assign(L.out, 0.0);
    const auto& a = tr.post[l];
    for (std::size_t o = 0; o < L.out; ++o) {
      double acc = L.has_bias ? theta[L.b_off + o] : 0.0;
      const double* w = &theta[L.w_off + o * L.in];
      for (std::size_t i = 0; i < L.in; ++i) acc += w[i] * a[i];
      z[o] = acc;
    }
    if (l + 1 < layers.size()) {
      auto& next = tr.post[l + 1];
      next.resize(L.out);
      for (std::size_t o = 0; o < L.out; ++o) next[o] = activate(spec.activation, z[o]);
    }
  }
}

// Per-sample loss and dLoss/dOutput.
double output_loss(const Dataset& data, std::span<const double> out, double target,
                   std::vector<double>* dout) {
  if (!data.classification) {
    const double r = out[0] - target;
    if (dout) dout->assign(1, r);
    return 0.5 * r * r;
  }
  if (out.size() == 1) {
    const double z = out[0];
    if (dout) dout->assign(1, sigmoid(z) - target);
    return softplus(z) - target * z;
  }
  const double zmax = *std::max_element(out.begin(), out.end());
  double sum = 0.0;
  for (double z : out) sum += std::exp(z - zmax);
  const double lse = zmax + std::log(sum);
  const auto cls = static_cast<std::size_t>(target);
  if (dout) {
    dout->resize(out.size());
    for (std::size_t c = 0; c < out.size(); ++c) {
      (*dout)[c] = std::exp(out[c] - lse) - (c == cls ? 1.0 : 0.0);
    }
  }
  return lse - out[cls];
}

double l2_term(const ModelSpec& spec, std::span<const double> theta) {
  if (spec.l2 == 0.0) return 0.0;
  double sq = 0.0;
  for (double v : theta) sq += v * v;
  return 0.5 * spec.l2 * sq;
}

void check_batch(const Dataset& data, std::span<const std::size_t> batch) {
  if (batch.empty()) throw DimensionError("loss_and_grad: empty batch");
  for (std::size_t i : batch) {
    if (i >= data.size()) throw RangeError("batch index " + std::to_string(i) + " out of range");
  }
}

std::vector<std::size_t> all_rows(const Dataset& data) {
  std::vector<std::size_t> idx(data.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return idx;
}

}  // namespace

void check_compatible(const ModelSpec& spec, const Dataset& data) {
  spec.validate();
  if (spec.kind == ModelKind::kLogisticRegression && !data.classification) {
    throw ConfigError("logistic_regression needs a classification dataset");
  }
  if (spec.kind == ModelKind::kLinearRegression && data.classification) {
    throw ConfigError("linear_regression needs a regression dataset");
  }
  if (spec.kind == ModelKind::kMlp) {
    if (spec.layer_sizes.front() != data.input_dim) {
      throw ConfigError("model.layer_sizes starts with " +
                        std::to_string(spec.layer_sizes.front()) + " but the dataset has " +
                        std::to_string(data.input_dim) + " inputs");
    }
    const std::size_t out = spec.layer_sizes.back();
    if (!data.classification && out != 1) {
      throw ConfigError("regression mlp needs a single output");
    }
    if (data.classification && out != 1 && out != data.num_classes) {
      throw ConfigError("classification mlp needs 1 or num_classes outputs");
    }
  }
}

ParamState init_params(const ModelSpec& spec, std::size_t input_dim, std::uint64_t seed) {
  spec.validate();
  if (spec.kind == ModelKind::kMlp && spec.layer_sizes.front() != input_dim) {
    throw ConfigError("model.layer_sizes[0] must equal the input dimension");
  }
  auto shapes = layout_shapes(spec, input_dim);
  const auto layers = layers_of(spec, input_dim);
  std::size_t d = 0;
  for (const auto& s : shapes) d += s.size();
  std::vector<double> theta(d, 0.0);
  std::mt19937_64 rng(seed);
  for (const Layer& L : layers) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(L.in));
    std::uniform_real_distribution<double> u(-bound, bound);
    for (std::size_t k = 0; k < L.in * L.out; ++k) theta[L.w_off + k] = u(rng);
  }
  return ParamState(std::move(theta), std::move(shapes));
}

LossGrad loss_and_grad(const ModelSpec& spec, const ParamState& params, const Dataset& data,
                       std::span<const std::size_t> batch) {
  check_batch(data, batch);
  const std::size_t in = input_width(spec, params);
  if (in != data.input_dim) throw DimensionError("model input width does not match dataset");
  const auto layers = layers_of(spec, in);
  const auto theta = params.values();

  LossGrad out;
  out.grad.assign(params.size(), 0.0);
  Trace tr;
  std::vector<double> delta;
  std::vector<double> back;
  double total = 0.0;
  for (std::size_t i : batch) {
    forward(spec, layers, theta, data.row(i), tr);
    total += output_loss(data, tr.pre.back(), data.targets[i], &delta);
    for (std::size_t l = layers.size(); l-- > 0;) {
      const Layer& L = layers[l];
      const auto& a = tr.post[l];
      for (std::size_t o = 0; o < L.out; ++o) {
        double* gw = &out.grad[L.w_off + o * L.in];
        for (std::size_t k = 0; k < L.in; ++k) gw[k] += delta[o] * a[k];
        if (L.has_bias) out.grad[L.b_off + o] += delta[o];
      }
      if (l == 0) break;
      back.assign(L.in, 0.0);
      for (std::size_t o = 0; o < L.out; ++o) {
        const double* w = &theta[L.w_off + o * L.in];
        for (std::size_t k = 0; k < L.in; ++k) back[k] += w[k] * delta[o];
      }
      const auto& z = tr.pre[l - 1];
      for (std::size_t k = 0; k < L.in; ++k) {
        back[k] *= activate_grad(spec.activation, z[k], a[k]);
      }
      delta.swap(back);
    }
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  out.loss = total * inv + l2_term(spec, theta);
  for (std::size_t j = 0; j < out.grad.size(); ++j) {
    out.grad[j] = out.grad[j] * inv + spec.l2 * theta[j];
  }
  if (!std::isfinite(out.loss)) throw NumericError("loss_and_grad: non-finite loss");
  for (double g : out.grad) {
    if (!std::isfinite(g)) throw NumericError("loss_and_grad: non-finite gradient");
  }
  return out;
}

LossGrad loss_and_grad(const ModelSpec& spec, const ParamState& params, const Dataset& data) {
  const auto idx = all_rows(data);
  return loss_and_grad(spec, params, data, idx);
}

double loss_value(const ModelSpec& spec, std::span<const double> theta, const ParamState& layout,
                  const Dataset& data, std::span<const std::size_t> batch) {
  check_batch(data, batch);
  if (theta.size() != layout.size()) throw DimensionError("loss_value: theta/layout mismatch");
  const std::size_t in = input_width(spec, layout);
  const auto layers = layers_of(spec, in);
  Trace tr;
  double total = 0.0;
  for (std::size_t i : batch) {
    forward(spec, layers, theta, data.row(i), tr);
    total += output_loss(data, tr.pre.back(), data.targets[i], nullptr);
  }
  const double loss = total / static_cast<double>(batch.size()) + l2_term(spec, theta);
  if (!std::isfinite(loss)) throw NumericError("loss_value: non-finite loss");
  return loss;
}

double evaluate(const ModelSpec& spec, const ParamState& params, const Dataset& data) {
  if (data.size() == 0) throw DimensionError("evaluate: empty dataset");
  const std::size_t in = input_width(spec, params);
  if (in != data.input_dim) throw DimensionError("model input width does not match dataset");
  const auto layers = layers_of(spec, in);
  Trace tr;
  double acc = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    forward(spec, layers, params.values(), data.row(i), tr);
    const auto& out = tr.pre.back();
    if (!data.classification) {
      const double r = out[0] - data.targets[i];
      acc += r * r;
    } else {
      std::size_t predicted = 0;
      if (out.size() == 1) {
        predicted = out[0] > 0.0 ? 1 : 0;
      } else {
        predicted = static_cast<std::size_t>(std::max_element(out.begin(), out.end()) - out.begin());
      }
      if (predicted == static_cast<std::size_t>(data.targets[i])) acc += 1.0;
    }
  }
  const double metric = acc / static_cast<double>(data.size());
  if (!std::isfinite(metric)) throw NumericError("evaluate: non-finite metric");
  return metric;
}

BatchStream::BatchStream(std::size_t n, std::size_t batch_size, std::uint64_t seed)
    : batch_size_(batch_size), order_(n), rng_(seed) {
  if (n == 0) throw DimensionError("BatchStream: empty dataset");
  if (batch_size == 0 || batch_size > n) {
    throw ConfigError("batch_size must lie in [1, n_train=" + std::to_string(n) + "]");
  }
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  reshuffle();
}

void BatchStream::reshuffle() {
  std::shuffle(order_.begin(), order_.end(), rng_);
  cursor_ = 0;
}

std::vector<std::size_t> BatchStream::next() {
  if (cursor_ + batch_size_ > order_.size()) reshuffle();
  std::vector<std::size_t> batch(order_.begin() + static_cast<std::ptrdiff_t>(cursor_),
                                 order_.begin() + static_cast<std::ptrdiff_t>(cursor_ + batch_size_));
  cursor_ += batch_size_;
  return batch;
}

}  // namespace ucbprune
