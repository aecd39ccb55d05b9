// Copyright 2026 The ucbprune Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ucbprune/config_io.hpp"
#include "ucbprune/error.hpp"
#include "ucbprune/experiments.hpp"
#include "ucbprune/oracle.hpp"
#include "ucbprune/report_io.hpp"

namespace ucbprune::cli {

namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string config;
  std::vector<std::string> overrides;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::size_t parallel = 0;
  std::vector<std::string> only;
  std::string axis;
  std::vector<std::string> values;
  std::string seeds = "0,1,2,3,4";
  std::string target;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

ExperimentConfig load(const Options& o) {
  if (o.config.empty()) throw UsageError("--config is required");
  if (!fs::is_regular_file(o.config)) throw UsageError("config file not found: " + o.config);
  std::vector<std::string> overrides = o.overrides;
  if (o.seed) overrides.push_back("train.seed=" + std::to_string(*o.seed));
  return load_config(o.config, overrides);
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size()) {
      throw UsageError("--seeds: '" + item + "' is not a non-negative integer");
    }
    seeds.push_back(v);
  }
  if (seeds.empty()) throw UsageError("--seeds: at least one seed is required");
  return seeds;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path.string());
  f << text;
}

int cmd_run(const Options& o, std::ostream& out, std::ostream& err) {
  const ExperimentConfig config = load(o);
  const auto start = std::chrono::steady_clock::now();
  const RunReport report = run_experiment(config);
  write_run_artifacts(o.out, report, seconds_since(start));
  if (report.failed) {
    err << "ucbprune: run diverged: " << report.failure << '\n';
    return kExitDiverged;
  }
  out << report.metric_name << '=' << format_double(report.final_metric) << " retained="
      << report.final_retained << '/' << report.prunable_count
      << " mask_flips=" << report.mask_flips << '\n'
      << "wrote " << (fs::path(o.out) / "summary.json").string() << '\n';
  return kExitOk;
}

int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err) {
  const auto seeds = parse_seeds(o.seeds);
  if (o.values.empty()) throw UsageError("--values: at least one value is required");
  const ExperimentConfig base = load(o);
  const SweepAxis axis = parse_sweep_axis(o.axis);
  const SweepTable table = sweep(base, axis, o.values, seeds, o.parallel);

  fs::create_directories(o.out);
  {
    std::ofstream f(fs::path(o.out) / "sweep.csv", std::ios::binary);
    write_sweep_rows_csv(f, table);
  }
  {
    std::ofstream f(fs::path(o.out) / "sweep_aggregate.csv", std::ios::binary);
    write_sweep_aggregate_csv(f, table);
  }
  write_sweep_aggregate_csv(out, table);
  std::size_t failed = 0;
  for (const auto& r : table.rows) {
    if (r.failed) {
      ++failed;
      err << "ucbprune: " << to_string(axis) << '=' << r.value << " seed=" << r.seed
          << " failed: " << r.failure << '\n';
    }
  }
  if (failed) err << "ucbprune: " << failed << " of " << table.rows.size() << " runs failed\n";
  return kExitOk;
}

int cmd_oracle(const Options& o, std::ostream& out, std::ostream& err, const Hooks& hooks) {
  OracleSuiteOptions opts;
  opts.only = o.only;
  if (hooks.topk) opts.topk = hooks.topk;
  if (o.seed) opts.seed = *o.seed;
  const auto start = std::chrono::steady_clock::now();
  const auto reports = run_oracle_suite(opts);
  if (reports.empty()) throw UsageError("--only matched no oracle subject");

  nlohmann::ordered_json j;
  j["version"] = std::string(kVersion);
  bool all = true;
  for (const auto& r : reports) all = all && r.pass;
  j["pass"] = all;
  j["subjects"] = oracle_reports_to_json(reports);
  j["wall_clock_seconds"] = seconds_since(start);
  fs::create_directories(o.out);
  write_text(fs::path(o.out) / "oracle_report.json", j.dump(2) + "\n");

  for (const auto& r : reports) {
    out << (r.pass ? "pass " : "FAIL ") << r.subject << "  max_abs_error=" << format_double(r.max_abs_error)
        << " tolerance=" << format_double(r.tolerance) << " cases=" << r.cases_checked << '\n';
  }
  if (!all) {
    err << "ucbprune: oracle failures:";
    for (const auto& r : reports) {
      if (!r.pass) err << ' ' << r.subject;
    }
    err << '\n';
    return kExitOracle;
  }
  return kExitOk;
}

int cmd_inspect(const Options& o, std::ostream& out) {
  fs::path path = o.target;
  if (fs::is_directory(path)) path /= "summary.json";
  std::ifstream f(path);
  if (!f) throw UsageError("cannot read " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(path.string() + ": not a run summary (" + e.what() + ")");
  }
  if (!j.contains("final_retained") || !j.contains("prunable_count")) {
    throw UsageError(path.string() + ": not a run summary");
  }
  const auto& cfg = j.at("config");
  out << "status=" << j.value("status", "") << '\n'
      << "variant=" << cfg.at("score").value("variant", "") << '\n'
      << "r_final=" << format_double(cfg.at("schedule").value("r_final", 0.0)) << '\n'
      << "metric_name=" << j.value("metric_name", "") << '\n'
      << "final_metric="
      << (j.at("final_metric").is_number() ? format_double(j.at("final_metric").get<double>())
                                          : std::string("n/a"))
      << '\n'
      << "prunable=" << j.at("prunable_count").get<std::size_t>() << '\n'
      << "retained=" << j.at("final_retained").get<std::size_t>() << '\n'
      << "sparsity=" << format_double(j.value("final_sparsity", 0.0)) << '\n'
      << "mask_flips=" << j.value("mask_flips", std::size_t{0}) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
         const Hooks& hooks) {
  CLI::App app{"Uncertainty-aware iterative pruning on desk-scale models", "ucbprune"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  Options o;

  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "experiment config file (INI)")->required();
    sub->add_option("--override", o.overrides, "section.key=value, applied after the file")
        ->take_all()
        ->allow_extra_args(false);
    sub->add_option("--out", o.out, "output directory")->capture_default_str();
  };

  auto* run = app.add_subcommand("run", "train and prune one model");
  add_config(run);
  run->add_option("--seed", o.seed, "overrides train.seed");

  auto* sw = app.add_subcommand("sweep", "one run per (axis value, seed)");
  add_config(sw);
  sw->add_option("--axis", o.axis, "ratio, beta1, beta2 or variant")->required();
  sw->add_option("--values", o.values, "comma-separated axis values")->required()->delimiter(',');
  sw->add_option("--seeds", o.seeds, "comma-separated seeds")->capture_default_str();
  sw->add_option("--parallel", o.parallel, "worker threads (0 = all cores)")->capture_default_str();

  auto* orc = app.add_subcommand("oracle", "run the brute-force oracle suite");
  orc->add_option("--only", o.only, "subject prefixes to keep")->delimiter(',');
  orc->add_option("--out", o.out, "output directory")->capture_default_str();
  orc->add_option("--seed", o.seed, "suite seed");

  auto* ins = app.add_subcommand("inspect", "summarise a run's summary.json");
  ins->add_option("target", o.target, "summary.json or a run output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    const auto* failing = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << "ucbprune: usage error: " << e.what() << "\n\n" << failing->help();
    return kExitUsage;
  }

  try {
    if (*run) return cmd_run(o, out, err);
    if (*sw) return cmd_sweep(o, out, err);
    if (*orc) return cmd_oracle(o, out, err, hooks);
    if (*ins) return cmd_inspect(o, out);
  } catch (const UsageError& e) {
    err << "ucbprune: usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "ucbprune: config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericError& e) {
    err << "ucbprune: numeric error: " << e.what() << '\n';
    return kExitDiverged;
  } catch (const Error& e) {
    err << "ucbprune: error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const fs::filesystem_error& e) {
    err << "ucbprune: filesystem error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace ucbprune::cli
