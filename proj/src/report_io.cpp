// Copyright 2026 The ucbprune Authors
// SPDX-License-Identifier: Apache-2.0

#include "ucbprune/report_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "ucbprune/config_io.hpp"
#include "ucbprune/error.hpp"

namespace ucbprune {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

template <typename T>
T parse_cell(const std::string& text, const char* column) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError(std::string("csv column ") + column + ": cannot parse '" + text + "'");
  }
  return value;
}

double parse_double_cell(const std::string& text, const char* column) {
  if (text == "nan") return std::nan("");
  if (text == "inf") return INFINITY;
  if (text == "-inf") return -INFINITY;
  return parse_cell<double>(text, column);
}

nlohmann::ordered_json number_or_null(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

}  // namespace

void write_metrics_csv(std::ostream& out, const RunReport& report) {
  out << "step,train_loss,ratio,retained,eval_metric\n";
  std::size_t e = 0;
  for (const auto& row : report.per_step) {
    out << row.step << ',' << format_double(row.train_loss) << ',' << format_double(row.ratio)
        << ',' << row.retained << ',';
    while (e < report.eval_curve.size() && report.eval_curve[e].step < row.step) ++e;
    if (e < report.eval_curve.size() && report.eval_curve[e].step == row.step) {
      out << format_double(report.eval_curve[e].metric);
    }
    out << '\n';
  }
}

MetricsTable read_metrics_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "step,train_loss,ratio,retained,eval_metric") {
    throw ConfigError("metrics csv: unexpected header");
  }
  MetricsTable table;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 5) throw ConfigError("metrics csv: expected 5 columns in '" + line + "'");
    StepRecord r;
    r.step = parse_cell<std::size_t>(cells[0], "step");
    r.train_loss = parse_double_cell(cells[1], "train_loss");
    r.ratio = parse_double_cell(cells[2], "ratio");
    r.retained = parse_cell<std::size_t>(cells[3], "retained");
    table.per_step.push_back(r);
    if (!cells[4].empty()) table.eval_curve.push_back({r.step, parse_double_cell(cells[4], "eval_metric")});
  }
  return table;
}

void write_snapshots_csv(std::ostream& out, const std::vector<std::size_t>& steps,
                         const std::vector<std::vector<double>>& rows) {
  const std::size_t width = rows.empty() ? 0 : rows.front().size();
  out << "step";
  for (std::size_t w = 0; w < width; ++w) out << ",w" << w;
  out << '\n';
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out << steps.at(i);
    for (double v : rows[i]) out << ',' << format_double(v);
    out << '\n';
  }
}

SnapshotTable read_snapshots_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("step", 0) != 0) {
    throw ConfigError("snapshot csv: unexpected header");
  }
  const std::size_t width = split_csv_line(line).size() - 1;
  SnapshotTable table;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != width + 1) throw ConfigError("snapshot csv: ragged row");
    table.steps.push_back(parse_cell<std::size_t>(cells[0], "step"));
    std::vector<double> row(width);
    for (std::size_t w = 0; w < width; ++w) row[w] = parse_double_cell(cells[w + 1], "score");
    table.rows.push_back(std::move(row));
  }
  return table;
}

nlohmann::ordered_json oracle_reports_to_json(const std::vector<OracleReport>& reports) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    arr.push_back({{"subject", r.subject},
                   {"max_abs_error", number_or_null(r.max_abs_error)},
                   {"tolerance", r.tolerance},
                   {"cases_checked", r.cases_checked},
                   {"pass", r.pass}});
  }
  return arr;
}

nlohmann::ordered_json run_summary_json(const RunReport& report,
                                        const std::vector<OracleReport>& oracle_reports,
                                        double wall_clock_seconds) {
  nlohmann::ordered_json j;
  j["version"] = std::string(kVersion);
  j["status"] = report.failed ? "failed" : "ok";
  if (report.failed) j["failure"] = report.failure;
  j["config"] = config_to_json(report.config_echo);
  j["metric_name"] = report.metric_name;
  j["final_metric"] = number_or_null(report.final_metric);
  j["steps_completed"] = report.per_step.size();
  j["prunable_count"] = report.prunable_count;
  j["final_retained"] = report.final_retained;
  j["final_sparsity"] =
      report.prunable_count == 0
          ? 0.0
          : 1.0 - static_cast<double>(report.final_retained) /
                      static_cast<double>(report.prunable_count);
  j["mask_flips"] = report.mask_flips;
  j["oracle_reports"] = oracle_reports_to_json(oracle_reports);
  j["wall_clock_seconds"] = wall_clock_seconds;
  return j;
}

void write_run_artifacts(const std::filesystem::path& dir, const RunReport& report,
                         double wall_clock_seconds) {
  std::filesystem::create_directories(dir);
  const auto open = [&](const char* name) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + (dir / name).string());
    return f;
  };
  {
    auto f = open("metrics.csv");
    write_metrics_csv(f, report);
  }
  {
    auto f = open("scores.csv");
    write_snapshots_csv(f, report.snapshot_steps, report.score_snapshots);
  }
  {
    auto f = open("sensitivity.csv");
    write_snapshots_csv(f, report.snapshot_steps, report.sensitivity_snapshots);
  }
  {
    auto f = open("config.resolved.cfg");
    f << to_ini(report.config_echo);
  }
  {
    auto f = open("summary.json");
    f << run_summary_json(report, consistency_checks(report), wall_clock_seconds).dump(2) << '\n';
  }
}

void write_sweep_rows_csv(std::ostream& out, const SweepTable& table) {
  out << "value,seed,final_metric,failed\n";
  for (const auto& r : table.rows) {
    out << r.value << ',' << r.seed << ',' << (r.failed ? "" : format_double(r.final_metric))
        << ',' << (r.failed ? 1 : 0) << '\n';
  }
}

void write_sweep_aggregate_csv(std::ostream& out, const SweepTable& table) {
  out << to_string(table.axis) << ",mean,stddev,runs,failed\n";
  for (const auto& a : table.aggregates) {
    out << a.value << ',' << (std::isfinite(a.mean) ? format_double(a.mean) : "") << ','
        << (std::isfinite(a.stddev) ? format_double(a.stddev) : "") << ',' << a.runs << ','
        << a.failed << '\n';
  }
}

}  // namespace ucbprune
