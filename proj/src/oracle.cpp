// Copyright 2026 The ucbprune Authors
// SPDX-License-Identifier: Apache-2.0

#include "ucbprune/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "ucbprune/error.hpp"
#include "ucbprune/importance.hpp"
#include "ucbprune/pruner.hpp"

namespace ucbprune {

Mask topk_by_sort(std::span<const double> scores, std::size_t k) {
  if (k > scores.size()) {
    throw RangeError("topk_by_sort: k=" + std::to_string(k) + " exceeds " +
                     std::to_string(scores.size()) + " scores");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  Mask mask = Mask::zeros(scores.size());
  for (std::size_t i = 0; i < k; ++i) mask.set(order[i], true);
  return mask;
}

double ema_direct_sum(std::span<const double> history, double beta) {
  const std::size_t t = history.size();
  long double sum = 0.0L;
  long double weight = 1.0L;  // beta^(t-k), walking k downwards
  for (std::size_t k = t; k-- > 0;) {
    sum += weight * static_cast<long double>(history[k]);
    weight *= static_cast<long double>(beta);
  }
  return static_cast<double>((1.0L - static_cast<long double>(beta)) * sum);
}

std::vector<double> finite_difference_gradient(const LossFn& loss, std::span<const double> theta,
                                               double h) {
  std::vector<double> x(theta.begin(), theta.end());
  std::vector<double> g(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double saved = x[j];
    x[j] = saved + h;
    const double up = loss(x);
    x[j] = saved - h;
    const double down = loss(x);
    x[j] = saved;
    g[j] = (up - down) / (2.0 * h);
  }
  return g;
}

double relative_error(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("relative_error: length mismatch");
  double diff = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    diff += (a[j] - b[j]) * (a[j] - b[j]);
    na += a[j] * a[j];
    nb += b[j] * b[j];
  }
  const double denom = std::max({std::sqrt(na), std::sqrt(nb), 1e-12});
  return std::sqrt(diff) / denom;
}

TaylorResidual taylor_residual(const LossFn& loss, std::span<const double> theta,
                               std::span<const double> grad, std::size_t j) {
  if (j >= theta.size() || grad.size() != theta.size()) {
    throw DimensionError("taylor_residual: index or gradient length out of range");
  }
  std::vector<double> removed(theta.begin(), theta.end());
  removed[j] = 0.0;
  TaylorResidual r;
  r.approx = std::fabs(theta[j] * grad[j]);
  r.exact = std::fabs(loss(theta) - loss(removed));
  if (!std::isfinite(r.approx) || !std::isfinite(r.exact)) {
    throw NumericError("taylor_residual: non-finite loss");
  }
  return r;
}

TaylorResidual taylor_residual(const ModelSpec& spec, const ParamState& params,
                               const Dataset& data, std::span<const std::size_t> batch,
                               std::size_t j) {
  if (j >= params.size() || !params.is_prunable(j)) {
    throw RangeError("taylor_residual: index " + std::to_string(j) + " is not prunable");
  }
  const auto lg = loss_and_grad(spec, params, data, batch);
  const LossFn loss = [&](std::span<const double> theta) {
    return loss_value(spec, theta, params, data, batch);
  };
  return taylor_residual(loss, params.values(), lg.grad, j);
}

namespace {

double fit_slope(std::span<const double> xs, std::span<const double> ys) {
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace

double taylor_scaling_exponent(const ModelSpec& spec, const ParamState& params,
                               const Dataset& data, std::span<const std::size_t> batch,
                               std::size_t j, std::span<const double> scales) {
  static constexpr double kDefaultScales[] = {1.0, 0.5, 0.25, 0.125};
  if (scales.empty()) scales = kDefaultScales;
  std::vector<double> log_scale, log_residual;
  for (double s : scales) {
    std::vector<double> theta(params.values().begin(), params.values().end());
    theta[j] *= s;
    const auto r = taylor_residual(spec, params.with_values(std::move(theta)), data, batch, j);
    if (!(r.residual() > 0.0)) {
      throw NumericError("taylor_scaling_exponent: zero residual at scale " + std::to_string(s));
    }
    log_scale.push_back(std::log(s));
    log_residual.push_back(std::log(r.residual()));
  }
  return fit_slope(log_scale, log_residual);
}

namespace {

// Projected full-batch gradient descent on the train split; returns the
// eval loss at the end.
double train_masked(const ModelSpec& spec, const DataSplit& data, const Mask& mask,
                    const TrainerSettings& settings) {
  ParamState params = apply_mask(init_params(spec, data.train.input_dim, settings.seed), mask);
  for (std::size_t step = 0; step < settings.steps; ++step) {
    const auto lg = loss_and_grad(spec, params, data.train);
    std::vector<double> theta(params.values().begin(), params.values().end());
    for (std::size_t j = 0; j < theta.size(); ++j) theta[j] -= settings.lr * lg.grad[j];
    params = apply_mask(params.with_values(std::move(theta)), mask);
  }
  return loss_and_grad(spec, params, data.eval).loss;
}

}  // namespace

MaskSearchResult exhaustive_mask_search(const ModelSpec& spec, const DataSplit& data,
                                        std::size_t k, const TrainerSettings& settings,
                                        EnumerationOrder order) {
  check_compatible(spec, data.train);
  const ParamState layout = init_params(spec, data.train.input_dim, settings.seed);
  const auto prunable = layout.prunable_indices();
  if (prunable.size() > 16) {
    throw GuardError("exhaustive_mask_search: " + std::to_string(prunable.size()) +
                     " prunable entries exceed the enumeration limit of 16");
  }
  if (k > prunable.size()) {
    throw RangeError("exhaustive_mask_search: k exceeds the prunable count");
  }

  // Selection bits over the prunable entries; forward order starts at the
  // lexicographically largest combination (1..10..0) and walks down.
  std::vector<std::uint8_t> pick(prunable.size(), 0);
  if (order == EnumerationOrder::kForward) {
    std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(k), 1);
  } else {
    std::fill(pick.end() - static_cast<std::ptrdiff_t>(k), pick.end(), 1);
  }

  MaskSearchResult best;
  bool have = false;
  do {
    Mask mask = Mask::ones(layout.size());
    for (std::size_t i = 0; i < prunable.size(); ++i) mask.set(prunable[i], pick[i] != 0);
    const double loss = train_masked(spec, data, mask, settings);
    ++best.candidates;
    const bool better = !have || loss < best.best_loss ||
                        (loss == best.best_loss &&
                         std::lexicographical_compare(best.best_mask.bits().begin(),
                                                      best.best_mask.bits().end(),
                                                      mask.bits().begin(), mask.bits().end()));
    if (better) {
      best.best_mask = std::move(mask);
      best.best_loss = loss;
      have = true;
    }
  } while (order == EnumerationOrder::kForward ? std::prev_permutation(pick.begin(), pick.end())
                                               : std::next_permutation(pick.begin(), pick.end()));
  return best;
}

// ---------------------------------------------------------------------------
// Suite
// ---------------------------------------------------------------------------

namespace {

constexpr double kAlgebraicTol = 1e-12;
constexpr double kFiniteDifferenceTol = 1e-6;
constexpr double kTaylorExponentTol = 0.1;

OracleReport topk_cross_check(const OracleSuiteOptions& options) {
  std::mt19937_64 rng(derive_seed(options.seed, 11));
  std::uniform_int_distribution<std::size_t> length(1, 512);
  std::uniform_real_distribution<double> cont(0.0, 1.0);
  std::uniform_int_distribution<int> coarse(0, 4);
  const auto& topk = options.topk ? options.topk : select_topk;

  OracleReport rep{"topk.cross_check", 0.0, 0.0, 0, true};
  for (std::size_t c = 0; c < 10000; ++c) {
    const std::size_t n = length(rng);
    std::vector<double> s(n);
    switch (c % 3) {
      case 0: for (auto& v : s) v = cont(rng); break;
      case 1: for (auto& v : s) v = coarse(rng); break;     // heavy ties
      default: std::fill(s.begin(), s.end(), 0.5); break;   // all tied
    }
    const std::size_t k = std::uniform_int_distribution<std::size_t>(0, n)(rng);
    const Mask got = topk(s, k);
    const Mask want = topk_by_sort(s, k);
    std::size_t mismatches = n;
    if (got.size() == want.size()) {
      mismatches = 0;
      for (std::size_t j = 0; j < n; ++j) mismatches += got[j] != want[j];
    }
    rep.max_abs_error = std::max(rep.max_abs_error, static_cast<double>(mismatches));
    ++rep.cases_checked;
  }
  rep.pass = rep.max_abs_error <= rep.tolerance;
  return rep;
}

// Runs the recursive averages over random sequences and compares every
// prefix against the direct sums.
std::pair<OracleReport, OracleReport> ema_checks(const OracleSuiteOptions& options) {
  std::mt19937_64 rng(derive_seed(options.seed, 12));
  std::uniform_int_distribution<std::size_t> length(1, 1000);
  std::uniform_real_distribution<double> expo(-6.0, 1.0);
  static constexpr double kBetas[] = {0.5, 0.85, 0.975};

  OracleReport imp{"ema.importance", 0.0, kAlgebraicTol, 0, true};
  OracleReport unc{"ema.uncertainty", 0.0, kAlgebraicTol, 0, true};
  for (std::size_t c = 0; c < 100; ++c) {
    const double beta = kBetas[c % 3];
    const std::size_t t = length(rng);
    ScoreConfig cfg;
    cfg.beta1 = cfg.beta2 = beta;
    PruneState state = PruneState::fresh(1);
    std::vector<double> i_hist, u_hist;
    for (std::size_t s = 0; s < t; ++s) {
      const double inst = std::pow(10.0, expo(rng));
      i_hist.push_back(inst);
      advance(state, std::span<const double>(&inst, 1), cfg);
      u_hist.push_back(std::fabs(inst - state.smoothed_importance[0]));
      const double di = ema_direct_sum(i_hist, beta);
      const double du = ema_direct_sum(u_hist, beta);
      imp.max_abs_error = std::max(imp.max_abs_error,
                                   std::fabs(state.smoothed_importance[0] - di) / std::fabs(di));
      if (du != 0.0) {
        unc.max_abs_error = std::max(
            unc.max_abs_error, std::fabs(state.smoothed_uncertainty[0] - du) / std::fabs(du));
      }
    }
    ++imp.cases_checked;
    ++unc.cases_checked;
  }
  imp.pass = imp.max_abs_error <= imp.tolerance;
  unc.pass = unc.max_abs_error <= unc.tolerance;
  return {imp, unc};
}

struct GradientCase {
  std::string subject;
  ModelSpec model;
  DatasetSpec data;
};

std::vector<GradientCase> gradient_cases() {
  std::vector<GradientCase> cases;
  {
    GradientCase c{"gradient.linear_regression", {}, {}};
    c.model.kind = ModelKind::kLinearRegression;
    c.model.l2 = 0.01;
    c.data.kind = DatasetKind::kSparseTeacher;
    c.data.input_dim = 6;
    c.data.noise_std = 0.1;
    cases.push_back(c);
  }
  {
    GradientCase c{"gradient.logistic_regression", {}, {}};
    c.model.kind = ModelKind::kLogisticRegression;
    c.model.l2 = 0.01;
    c.data.kind = DatasetKind::kGaussianClassification;
    c.data.input_dim = 5;
    c.data.noise_std = 1.0;
    cases.push_back(c);
  }
  {
    GradientCase c{"gradient.mlp_relu", {}, {}};
    c.model.kind = ModelKind::kMlp;
    c.model.layer_sizes = {4, 6, 2};
    c.model.activation = Activation::kRelu;
    c.data.kind = DatasetKind::kTwoMoonsLike;
    c.data.input_dim = 4;
    c.data.noise_std = 0.1;
    cases.push_back(c);
  }
  {
    GradientCase c{"gradient.mlp_tanh", {}, {}};
    c.model.kind = ModelKind::kMlp;
    c.model.layer_sizes = {5, 4, 3, 1};
    c.model.activation = Activation::kTanh;
    c.model.l2 = 0.001;
    c.data.kind = DatasetKind::kSparseTeacher;
    c.data.input_dim = 5;
    c.data.noise_std = 0.1;
    cases.push_back(c);
  }
  return cases;
}

OracleReport gradient_check(const GradientCase& gc, std::uint64_t seed) {
  DatasetSpec ds = gc.data;
  ds.n_train = 16;
  ds.n_eval = 4;
  ds.seed = seed;
  const auto split = generate_dataset(ds);
  const ParamState layout = init_params(gc.model, split.train.input_dim, seed);
  std::vector<std::size_t> batch(8);
  std::iota(batch.begin(), batch.end(), std::size_t{0});

  std::mt19937_64 rng(derive_seed(seed, 13));
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  OracleReport rep{gc.subject, 0.0, kFiniteDifferenceTol, 0, true};
  for (std::size_t point = 0; point < 50; ++point) {
    std::vector<double> theta(layout.size());
    for (auto& v : theta) v = u(rng);
    const ParamState params = layout.with_values(theta);
    const auto analytic = loss_and_grad(gc.model, params, split.train, batch);
    const auto numeric = finite_difference_gradient(
        [&](std::span<const double> x) {
          return loss_value(gc.model, x, layout, split.train, batch);
        },
        theta);
    rep.max_abs_error = std::max(rep.max_abs_error, relative_error(analytic.grad, numeric));
    ++rep.cases_checked;
  }
  rep.pass = rep.max_abs_error <= rep.tolerance;
  return rep;
}

// Fits the residual exponent of every prunable weight in 10 random networks
// and checks the median fit. Individual four-point fits are unreliable at the
// initial weight scale: theta_j * g_j and the loss change can differ in sign
// at scale 1, and hidden-layer weights of a tanh network can have nearly
// cancelling curvature so the cubic term leaks in. Both effects vanish as the
// scale shrinks.
OracleReport taylor_check(const std::string& subject, const ModelSpec& model,
                          const DatasetSpec& data_spec, std::uint64_t seed) {
  const auto split = generate_dataset(data_spec);
  std::vector<std::size_t> batch(std::min<std::size_t>(16, split.train.size()));
  std::iota(batch.begin(), batch.end(), std::size_t{0});
  OracleReport rep{subject, 0.0, kTaylorExponentTol, 0, true};
  std::vector<double> slopes;
  for (std::size_t c = 0; c < 10; ++c) {
    const ParamState params = init_params(model, split.train.input_dim, derive_seed(seed, 100 + c));
    for (std::size_t j : params.prunable_indices()) {
      slopes.push_back(taylor_scaling_exponent(model, params, split.train, batch, j));
    }
  }
  rep.cases_checked = slopes.size();
  const auto mid = slopes.begin() + static_cast<std::ptrdiff_t>(slopes.size() / 2);
  std::nth_element(slopes.begin(), mid, slopes.end());
  double median = *mid;
  if (slopes.size() % 2 == 0) median = 0.5 * (median + *std::max_element(slopes.begin(), mid));
  rep.max_abs_error = std::fabs(median - 2.0);
  rep.pass = rep.max_abs_error <= rep.tolerance;
  return rep;
}

bool wanted(const OracleSuiteOptions& options, const std::string& subject) {
  if (options.only.empty()) return true;
  return std::any_of(options.only.begin(), options.only.end(), [&](const std::string& prefix) {
    return subject.compare(0, prefix.size(), prefix) == 0;
  });
}

}  // namespace

std::vector<std::string> oracle_subjects() {
  std::vector<std::string> names = {"topk.cross_check", "ema.importance", "ema.uncertainty"};
  for (const auto& gc : gradient_cases()) names.push_back(gc.subject);
  names.push_back("taylor.quadratic");
  names.push_back("taylor.mlp");
  return names;
}

std::vector<OracleReport> run_oracle_suite(const OracleSuiteOptions& options) {
  std::vector<OracleReport> out;
  if (wanted(options, "topk.cross_check")) out.push_back(topk_cross_check(options));
  if (wanted(options, "ema.importance") || wanted(options, "ema.uncertainty")) {
    auto [imp, unc] = ema_checks(options);
    if (wanted(options, imp.subject)) out.push_back(imp);
    if (wanted(options, unc.subject)) out.push_back(unc);
  }
  for (const auto& gc : gradient_cases()) {
    if (wanted(options, gc.subject)) out.push_back(gradient_check(gc, options.seed));
  }
  if (wanted(options, "taylor.quadratic")) {
    ModelSpec m;
    m.kind = ModelKind::kLinearRegression;
    DatasetSpec d;
    d.kind = DatasetKind::kSparseTeacher;
    d.input_dim = 8;
    d.noise_std = 0.5;
    d.n_train = 32;
    d.seed = options.seed;
    out.push_back(taylor_check("taylor.quadratic", m, d, options.seed));
  }
  if (wanted(options, "taylor.mlp")) {
    ModelSpec m;
    m.kind = ModelKind::kMlp;
    m.layer_sizes = {4, 8, 1};
    m.activation = Activation::kTanh;
    DatasetSpec d;
    d.kind = DatasetKind::kTwoMoonsLike;
    d.input_dim = 4;
    d.noise_std = 0.1;
    d.n_train = 32;
    d.seed = options.seed;
    out.push_back(taylor_check("taylor.mlp", m, d, options.seed));
  }
  return out;
}

}  // namespace ucbprune
