// Copyright 2026 The ucbprune Authors
// SPDX-License-Identifier: Apache-2.0

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "ucbprune/config_io.hpp"
#include "ucbprune/error.hpp"
#include "ucbprune/experiments.hpp"
#include "ucbprune/oracle.hpp"
#include "ucbprune/pruner.hpp"

namespace py = pybind11;
using namespace ucbprune;

namespace {

using Vec = std::vector<double>;
using Bits = std::vector<std::uint8_t>;

Bits to_bits(const Mask& m) { return {m.bits().begin(), m.bits().end()}; }

// One flat [1, d] weight tensor; every entry prunable unless flags are given.
ParamState flat(Vec theta, std::optional<Bits> prunable) {
  const std::size_t d = theta.size();
  std::vector<TensorShape> shapes{{"w", {1, d}}};
  if (prunable) return ParamState(std::move(theta), std::move(shapes), std::move(*prunable));
  return ParamState(std::move(theta), std::move(shapes));
}

py::dict step_dict(const PruneStepOutput& out) {
  py::dict d;
  d["theta"] = Vec(out.params.values().begin(), out.params.values().end());
  d["state"] = out.state;
  d["mask"] = to_bits(out.mask);
  d["scores"] = out.scores;
  d["sensitivity"] = out.sensitivity;
  return d;
}

py::dict report_dict(const RunReport& r) {
  py::dict d;
  std::vector<std::size_t> steps, retained;
  Vec loss, ratio;
  for (const auto& row : r.per_step) {
    steps.push_back(row.step);
    loss.push_back(row.train_loss);
    ratio.push_back(row.ratio);
    retained.push_back(row.retained);
  }
  d["step"] = steps;
  d["train_loss"] = loss;
  d["ratio"] = ratio;
  d["retained"] = retained;
  std::vector<std::size_t> eval_steps;
  Vec eval_metric;
  for (const auto& e : r.eval_curve) {
    eval_steps.push_back(e.step);
    eval_metric.push_back(e.metric);
  }
  d["eval_step"] = eval_steps;
  d["eval_metric"] = eval_metric;
  d["metric_name"] = r.metric_name;
  d["final_metric"] = r.final_metric;
  d["mask_flips"] = r.mask_flips;
  d["final_mask"] = to_bits(r.final_mask);
  d["final_params"] = r.final_params;
  d["prunable"] = r.prunable;
  d["prunable_count"] = r.prunable_count;
  d["final_retained"] = r.final_retained;
  d["snapshot_steps"] = r.snapshot_steps;
  d["score_snapshots"] = r.score_snapshots;
  d["sensitivity_snapshots"] = r.sensitivity_snapshots;
  d["failed"] = r.failed;
  d["failure"] = r.failure;
  d["config"] = to_ini(r.config_echo);
  return d;
}

}  // namespace

PYBIND11_MODULE(_ucbprune, m) {
  m.doc() = "Uncertainty-aware iterative pruning on small models";
  m.attr("__version__") = std::string(kVersion);

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DimensionError>(m, "DimensionError", error.ptr());
  py::register_exception<NumericError>(m, "NumericError", error.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", error.ptr());
  py::register_exception<PartitionError>(m, "PartitionError", error.ptr());
  py::register_exception<RangeError>(m, "RangeError", error.ptr());
  py::register_exception<GuardError>(m, "GuardError", error.ptr());

  py::class_<ScheduleConfig>(m, "ScheduleConfig")
      .def(py::init([](double r_initial, double r_final, std::size_t t_initial,
                       std::size_t t_final, std::size_t total_steps, bool literal) {
             ScheduleConfig s{r_initial, r_final, t_initial, t_final, total_steps, literal};
             s.validate();
             return s;
           }),
           py::arg("r_initial") = 1.0, py::arg("r_final") = 0.1, py::arg("t_initial") = 0,
           py::arg("t_final") = 0, py::arg("total_steps") = 1, py::arg("literal") = false)
      .def_readwrite("r_initial", &ScheduleConfig::r_initial)
      .def_readwrite("r_final", &ScheduleConfig::r_final)
      .def_readwrite("t_initial", &ScheduleConfig::t_initial)
      .def_readwrite("t_final", &ScheduleConfig::t_final)
      .def_readwrite("total_steps", &ScheduleConfig::total_steps)
      .def_readwrite("literal", &ScheduleConfig::literal);

  py::class_<ScoreConfig>(m, "ScoreConfig")
      .def(py::init([](double beta1, double beta2, const std::string& variant,
                       double ratio_epsilon) {
             ScoreConfig c;
             c.beta1 = beta1;
             c.beta2 = beta2;
             c.variant = parse_score_variant(variant);
             c.ratio_epsilon = ratio_epsilon;
             c.validate();
             return c;
           }),
           py::arg("beta1") = 0.85, py::arg("beta2") = 0.95, py::arg("variant") = "platon",
           py::arg("ratio_epsilon") = 1e-12)
      .def_readwrite("beta1", &ScoreConfig::beta1)
      .def_readwrite("beta2", &ScoreConfig::beta2)
      .def_property(
          "variant", [](const ScoreConfig& c) { return std::string(to_string(c.variant)); },
          [](ScoreConfig& c, const std::string& v) { c.variant = parse_score_variant(v); });

  py::class_<PruneState>(m, "PruneState")
      .def(py::init([](std::size_t n) { return PruneState::fresh(n); }), py::arg("n"))
      .def_readwrite("smoothed_importance", &PruneState::smoothed_importance)
      .def_readwrite("smoothed_uncertainty", &PruneState::smoothed_uncertainty)
      .def_readwrite("step", &PruneState::step);

  m.def("select_topk", [](const Vec& s, std::size_t k) { return to_bits(select_topk(s, k)); },
        py::arg("scores"), py::arg("k"));
  m.def("topk_by_sort", [](const Vec& s, std::size_t k) { return to_bits(topk_by_sort(s, k)); },
        py::arg("scores"), py::arg("k"));
  m.def("sensitivity", [](const Vec& t, const Vec& g) { return sensitivity(t, g); },
        py::arg("theta"), py::arg("grad"));
  m.def("ema_update", [](const Vec& prev, const Vec& x, double beta) {
    return ema_update(prev, x, beta);
  }, py::arg("previous"), py::arg("instant"), py::arg("beta"));
  m.def("uncertainty", [](const Vec& i, const Vec& ibar) { return uncertainty(i, ibar); },
        py::arg("instant"), py::arg("smoothed"));
  m.def("ema_direct_sum", [](const Vec& h, double beta) { return ema_direct_sum(h, beta); },
        py::arg("history"), py::arg("beta"));
  m.def("score",
        [](const Vec& ibar, const Vec& ubar, const Vec& theta, const ScoreConfig& c) {
          PruneState st = PruneState::fresh(ibar.size());
          st.smoothed_importance = ibar;
          st.smoothed_uncertainty = ubar;
          return score(st, theta, c);
        },
        py::arg("smoothed_importance"), py::arg("smoothed_uncertainty"), py::arg("theta"),
        py::arg("config") = ScoreConfig{});
  m.def("ratio_at", &ratio_at, py::arg("t"), py::arg("schedule"));
  m.def("retained_count", &retained_count, py::arg("r"), py::arg("d"));

  m.def("prune_step",
        [](Vec theta, const Vec& grad, const PruneState& state, double lr,
           const ScheduleConfig& schedule, const ScoreConfig& config,
           std::optional<Bits> prunable) {
          return step_dict(
              prune_step(flat(std::move(theta), std::move(prunable)), state, grad, lr, schedule, config));
        },
        py::arg("theta"), py::arg("grad"), py::arg("state"), py::arg("lr"), py::arg("schedule"),
        py::arg("config") = ScoreConfig{}, py::arg("prunable") = py::none());

  m.def("resolve_config",
        [](const std::string& text, const std::vector<std::string>& overrides) {
          return to_ini(parse_config(text, overrides));
        },
        py::arg("text"), py::arg("overrides") = std::vector<std::string>{},
        "Parse an INI config, apply overrides and return the fully resolved INI.");
  m.def("run_experiment",
        [](const std::string& text, const std::vector<std::string>& overrides) {
          const ExperimentConfig cfg = parse_config(text, overrides);
          RunReport r;
          {
            py::gil_scoped_release release;
            r = run_experiment(cfg);
          }
          return report_dict(r);
        },
        py::arg("config_text"), py::arg("overrides") = std::vector<std::string>{});
  m.def("run_oracle_suite",
        [](const std::vector<std::string>& only, std::uint64_t seed) {
          OracleSuiteOptions o;
          o.only = only;
          o.seed = seed;
          std::vector<OracleReport> reports;
          {
            py::gil_scoped_release release;
            reports = run_oracle_suite(o);
          }
          py::list out;
          for (const auto& r : reports) {
            py::dict d;
            d["subject"] = r.subject;
            d["max_abs_error"] = r.max_abs_error;
            d["tolerance"] = r.tolerance;
            d["cases_checked"] = r.cases_checked;
            d["pass"] = r.pass;
            out.append(d);
          }
          return out;
        },
        py::arg("only") = std::vector<std::string>{}, py::arg("seed") = 1234);
}
