// Copyright 2026 The ucbprune Authors
// SPDX-License-Identifier: Apache-2.0

#include "ucbprune/config_io.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "ucbprune/error.hpp"

namespace ucbprune {

namespace pt = boost::property_tree;

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& raw) {
  const std::string text = trim(raw);
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError(key + ": '" + raw + "' is not a valid number");
  }
  return value;
}

bool parse_bool(const std::string& key, const std::string& raw) {
  const std::string text = trim(raw);
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError(key + ": '" + raw + "' is not a boolean");
}

std::vector<std::size_t> parse_size_list(const std::string& key, const std::string& raw) {
  std::vector<std::size_t> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number<std::size_t>(key, item));
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string& key, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"model.kind", [](auto& c, auto&, auto& v) { c.model.kind = parse_model_kind(trim(v)); }},
      {"model.layer_sizes",
       [](auto& c, auto& k, auto& v) { c.model.layer_sizes = parse_size_list(k, v); }},
      {"model.activation",
       [](auto& c, auto&, auto& v) { c.model.activation = parse_activation(trim(v)); }},
      {"model.l2", [](auto& c, auto& k, auto& v) { c.model.l2 = parse_number<double>(k, v); }},
      {"dataset.kind",
       [](auto& c, auto&, auto& v) { c.dataset.kind = parse_dataset_kind(trim(v)); }},
      {"dataset.n_train",
       [](auto& c, auto& k, auto& v) { c.dataset.n_train = parse_number<std::size_t>(k, v); }},
      {"dataset.n_eval",
       [](auto& c, auto& k, auto& v) { c.dataset.n_eval = parse_number<std::size_t>(k, v); }},
      {"dataset.input_dim",
       [](auto& c, auto& k, auto& v) { c.dataset.input_dim = parse_number<std::size_t>(k, v); }},
      {"dataset.noise_std",
       [](auto& c, auto& k, auto& v) { c.dataset.noise_std = parse_number<double>(k, v); }},
      {"dataset.teacher_sparsity",
       [](auto& c, auto& k, auto& v) { c.dataset.teacher_sparsity = parse_number<double>(k, v); }},
      {"dataset.seed",
       [](auto& c, auto& k, auto& v) { c.dataset.seed = parse_number<std::uint64_t>(k, v); }},
      {"schedule.r_initial",
       [](auto& c, auto& k, auto& v) { c.schedule.r_initial = parse_number<double>(k, v); }},
      {"schedule.r_final",
       [](auto& c, auto& k, auto& v) { c.schedule.r_final = parse_number<double>(k, v); }},
      {"schedule.t_initial",
       [](auto& c, auto& k, auto& v) { c.schedule.t_initial = parse_number<std::size_t>(k, v); }},
      {"schedule.t_final",
       [](auto& c, auto& k, auto& v) { c.schedule.t_final = parse_number<std::size_t>(k, v); }},
      {"schedule.literal",
       [](auto& c, auto& k, auto& v) { c.schedule.literal = parse_bool(k, v); }},
      {"score.variant",
       [](auto& c, auto&, auto& v) { c.score.variant = parse_score_variant(trim(v)); }},
      {"score.beta1", [](auto& c, auto& k, auto& v) { c.score.beta1 = parse_number<double>(k, v); }},
      {"score.beta2", [](auto& c, auto& k, auto& v) { c.score.beta2 = parse_number<double>(k, v); }},
      {"score.ratio_epsilon",
       [](auto& c, auto& k, auto& v) { c.score.ratio_epsilon = parse_number<double>(k, v); }},
      {"train.lr", [](auto& c, auto& k, auto& v) { c.lr = parse_number<double>(k, v); }},
      {"train.momentum", [](auto& c, auto& k, auto& v) { c.momentum = parse_number<double>(k, v); }},
      {"train.batch_size",
       [](auto& c, auto& k, auto& v) { c.batch_size = parse_number<std::size_t>(k, v); }},
      {"train.total_steps",
       [](auto& c, auto& k, auto& v) { c.total_steps = parse_number<std::size_t>(k, v); }},
      {"train.seed", [](auto& c, auto& k, auto& v) { c.seed = parse_number<std::uint64_t>(k, v); }},
      {"train.snapshot_every",
       [](auto& c, auto& k, auto& v) { c.snapshot_every = parse_number<std::size_t>(k, v); }},
      {"train.eval_every",
       [](auto& c, auto& k, auto& v) { c.eval_every = parse_number<std::size_t>(k, v); }},
      {"structured.groups",
       [](auto& c, auto&, auto& v) { c.structured = parse_grouping(trim(v)); }},
  };
  return table;
}

void assign(ExperimentConfig& config, const std::string& key, const std::string& value) {
  const auto& table = setters();
  const auto it = table.find(key);
  if (it == table.end()) throw ConfigError("unknown config key '" + key + "'");
  it->second(config, key, value);
}

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, _] : setters()) keys.push_back(k);
  return keys;
}

ExperimentConfig parse_config(std::string_view text, std::span<const std::string> overrides) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config file: ") + e.what());
  }

  ExperimentConfig config;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ConfigError("config key '" + section + "' must live in a section");
    }
    for (const auto& [key, value] : body) assign(config, section + "." + key, value.data());
  }
  for (const auto& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ConfigError("override '" + ov + "' is not of the form section.key=value");
    }
    assign(config, trim(std::string_view(ov).substr(0, eq)), ov.substr(eq + 1));
  }
  config.overrides.assign(overrides.begin(), overrides.end());
  config.validate();
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path,
                             std::span<const std::string> overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), overrides);
}

namespace {

std::string join_sizes(const std::vector<std::size_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(v[i]);
  }
  return out;
}

}  // namespace

std::string to_ini(const ExperimentConfig& c) {
  std::ostringstream o;
  o << "[model]\n"
    << "kind = " << to_string(c.model.kind) << "\n";
  if (!c.model.layer_sizes.empty()) o << "layer_sizes = " << join_sizes(c.model.layer_sizes) << "\n";
  o << "activation = " << to_string(c.model.activation) << "\n"
    << "l2 = " << format_double(c.model.l2) << "\n\n"
    << "[dataset]\n"
    << "kind = " << to_string(c.dataset.kind) << "\n"
    << "n_train = " << c.dataset.n_train << "\n"
    << "n_eval = " << c.dataset.n_eval << "\n"
    << "input_dim = " << c.dataset.input_dim << "\n"
    << "noise_std = " << format_double(c.dataset.noise_std) << "\n"
    << "teacher_sparsity = " << format_double(c.dataset.teacher_sparsity) << "\n"
    << "seed = " << c.dataset.seed << "\n\n"
    << "[schedule]\n"
    << "r_initial = " << format_double(c.schedule.r_initial) << "\n"
    << "r_final = " << format_double(c.schedule.r_final) << "\n"
    << "t_initial = " << c.schedule.t_initial << "\n"
    << "t_final = " << c.schedule.t_final << "\n"
    << "literal = " << (c.schedule.literal ? "true" : "false") << "\n\n"
    << "[score]\n"
    << "variant = " << to_string(c.score.variant) << "\n"
    << "beta1 = " << format_double(c.score.beta1) << "\n"
    << "beta2 = " << format_double(c.score.beta2) << "\n"
    << "ratio_epsilon = " << format_double(c.score.ratio_epsilon) << "\n\n"
    << "[train]\n"
    << "lr = " << format_double(c.lr) << "\n"
    << "momentum = " << format_double(c.momentum) << "\n"
    << "batch_size = " << c.batch_size << "\n"
    << "total_steps = " << c.total_steps << "\n"
    << "seed = " << c.seed << "\n"
    << "snapshot_every = " << c.snapshot_every << "\n"
    << "eval_every = " << c.eval_every << "\n\n"
    << "[structured]\n"
    << "groups = " << to_string(c.structured) << "\n";
  return o.str();
}

nlohmann::ordered_json config_to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["model"] = {{"kind", to_string(c.model.kind)},
                {"layer_sizes", c.model.layer_sizes},
                {"activation", to_string(c.model.activation)},
                {"l2", c.model.l2}};
  j["dataset"] = {{"kind", to_string(c.dataset.kind)},
                  {"n_train", c.dataset.n_train},
                  {"n_eval", c.dataset.n_eval},
                  {"input_dim", c.dataset.input_dim},
                  {"noise_std", c.dataset.noise_std},
                  {"teacher_sparsity", c.dataset.teacher_sparsity},
                  {"seed", c.dataset.seed}};
  j["schedule"] = {{"r_initial", c.schedule.r_initial},
                   {"r_final", c.schedule.r_final},
                   {"t_initial", c.schedule.t_initial},
                   {"t_final", c.schedule.t_final},
                   {"literal", c.schedule.literal}};
  j["score"] = {{"variant", to_string(c.score.variant)},
                {"beta1", c.score.beta1},
                {"beta2", c.score.beta2},
                {"ratio_epsilon", c.score.ratio_epsilon}};
  j["train"] = {{"lr", c.lr},
                {"momentum", c.momentum},
                {"batch_size", c.batch_size},
                {"total_steps", c.total_steps},
                {"seed", c.seed},
                {"snapshot_every", c.snapshot_every},
                {"eval_every", c.eval_every}};
  j["structured"] = {{"groups", to_string(c.structured)}};
  j["overrides"] = c.overrides;
  return j;
}

}  // namespace ucbprune
