// Copyright (c) 2026 AutoShot Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "autoshot/run_config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

namespace autoshot {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(const std::string& v) {
  T out{};
  const char* first = v.data();
  const char* last = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) throw std::invalid_argument("expected a number, got '" + v + "'");
  return out;
}

double parse_double(const std::string& v) {
  std::size_t used = 0;
  double d = 0.0;
  try {
    d = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty()) throw std::invalid_argument("expected a real number, got '" + v + "'");
  return d;
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("expected true/false, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

// Shortest text that parses back to the same double.
std::string fmt(double d) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), d);
  return std::string(buf, res.ptr);
}

template <typename T>
std::string join(const T& values) {
  std::string out;
  for (const auto& v : values) {
    if (!out.empty()) out += ",";
    if constexpr (std::is_same_v<std::decay_t<decltype(v)>, bool>) {
      out += v ? "true" : "false";
    } else {
      out += std::to_string(v);
    }
  }
  return out;
}

struct Key {
  std::string name;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename T>
Key size_key(std::string name, T RunConfig::*member) {
  return {std::move(name), [member](RunConfig& c, const std::string& v) { c.*member = parse_number<T>(v); },
          [member](const RunConfig& c) { return std::to_string(c.*member); }};
}

Key custom_size(std::string name, std::function<std::size_t&(RunConfig&)> ref) {
  return {std::move(name), [ref](RunConfig& c, const std::string& v) { ref(c) = parse_number<std::size_t>(v); },
          [ref](const RunConfig& c) { return std::to_string(ref(const_cast<RunConfig&>(c))); }};
}

Key custom_double(std::string name, std::function<double&(RunConfig&)> ref) {
  return {std::move(name), [ref](RunConfig& c, const std::string& v) { ref(c) = parse_double(v); },
          [ref](const RunConfig& c) { return fmt(ref(const_cast<RunConfig&>(c))); }};
}

std::vector<Key> train_keys(const std::string& prefix, train::TrainConfig RunConfig::*member) {
  auto t = [member](RunConfig& c) -> train::TrainConfig& { return c.*member; };
  return {
      custom_double(prefix + "lr", [t](RunConfig& c) -> double& { return t(c).lr; }),
      custom_double(prefix + "momentum", [t](RunConfig& c) -> double& { return t(c).momentum; }),
      custom_size(prefix + "batch", [t](RunConfig& c) -> std::size_t& { return t(c).batch; }),
      custom_size(prefix + "epochs", [t](RunConfig& c) -> std::size_t& { return t(c).epochs; }),
      custom_size(prefix + "steps_per_epoch", [t](RunConfig& c) -> std::size_t& { return t(c).steps_per_epoch; }),
      custom_double(prefix + "clip_norm", [t](RunConfig& c) -> double& { return t(c).clip_norm; }),
      custom_size(prefix + "probe_batch", [t](RunConfig& c) -> std::size_t& { return t(c).probe_batch; }),
  };
}

const std::vector<Key>& registry() {
  static const std::vector<Key> keys = [] {
    std::vector<Key> k;
    k.push_back({"seed", [](RunConfig& c, const std::string& v) { c.seed = parse_number<std::uint64_t>(v); },
                 [](const RunConfig& c) { return std::to_string(c.seed); }});
    // Loss and sampling settings shared by every training stage.
    k.push_back(custom_double("lambda1", [](RunConfig& c) -> double& { return c.train.lambda1; }));
    k.push_back(custom_double("lambda2", [](RunConfig& c) -> double& { return c.train.lambda2; }));
    k.push_back(custom_size("n_f", [](RunConfig& c) -> std::size_t& { return c.train.sample.frames; }));
    k.push_back(custom_double("sample.gradual_probability", [](RunConfig& c) -> double& { return c.train.sample.gradual_probability; }));
    k.push_back(custom_size("sample.fade_min", [](RunConfig& c) -> std::size_t& { return c.train.sample.fade_min; }));
    k.push_back(custom_size("sample.fade_max", [](RunConfig& c) -> std::size_t& { return c.train.sample.fade_max; }));
    for (auto& key : train_keys("", &RunConfig::train)) k.push_back(std::move(key));
    for (auto& key : train_keys("supernet.", &RunConfig::supernet)) k.push_back(std::move(key));
    k.push_back(custom_double("graft.A", [](RunConfig& c) -> double& { return c.graft.A; }));
    k.push_back(custom_double("graft.c", [](RunConfig& c) -> double& { return c.graft.c; }));
    k.push_back(custom_size("graft.bins", [](RunConfig& c) -> std::size_t& { return c.graft.bins; }));
    k.push_back(custom_size("graft.networks", [](RunConfig& c) -> std::size_t& { return c.graft.networks; }));
    k.push_back(custom_size("search.population", [](RunConfig& c) -> std::size_t& { return c.search.population; }));
    k.push_back(custom_size("search.epochs", [](RunConfig& c) -> std::size_t& { return c.search.epochs; }));
    k.push_back(custom_size("search.init_epochs", [](RunConfig& c) -> std::size_t& { return c.search.init_epochs; }));
    k.push_back(custom_size("search.pool_size", [](RunConfig& c) -> std::size_t& { return c.search.pool_size; }));
    k.push_back(custom_size("search.gp_restarts", [](RunConfig& c) -> std::size_t& { return c.search.fit.restarts; }));
    k.push_back(custom_size("search.gp_iterations", [](RunConfig& c) -> std::size_t& { return c.search.fit.iterations; }));
    k.push_back({"search.prior_mean",
                 [](RunConfig& c, const std::string& v) {
                   if (v == "empirical") c.search.fit.prior_mean = bo::PriorMean::kEmpirical;
                   else if (v == "zero") c.search.fit.prior_mean = bo::PriorMean::kZero;
                   else throw std::invalid_argument("expected empirical or zero, got '" + v + "'");
                 },
                 [](const RunConfig& c) { return std::string(c.search.fit.prior_mean == bo::PriorMean::kZero ? "zero" : "empirical"); }});
    k.push_back({"search.genes",
                 [](RunConfig& c, const std::string& v) {
                   std::vector<std::size_t> genes;
                   for (const auto& item : split_list(v)) genes.push_back(parse_number<std::size_t>(item));
                   c.search_genes = genes;
                 },
                 [](const RunConfig& c) { return join(c.search_genes); }});
    k.push_back({"search.metric",
                 [](RunConfig& c, const std::string& v) {
                   if (v == "f1") c.metric = SearchMetric::kF1;
                   else if (v == "precision") c.metric = SearchMetric::kPrecisionAtRecall;
                   else throw std::invalid_argument("expected f1 or precision, got '" + v + "'");
                 },
                 [](const RunConfig& c) { return std::string(c.metric == SearchMetric::kF1 ? "f1" : "precision"); }});
    k.push_back(custom_double("recall_target", [](RunConfig& c) -> double& { return c.recall_target; }));
    k.push_back(custom_double("threshold", [](RunConfig& c) -> double& { return c.threshold; }));
    k.push_back(custom_size("infer.window", [](RunConfig& c) -> std::size_t& { return c.inference.window; }));
    k.push_back(custom_size("infer.batch", [](RunConfig& c) -> std::size_t& { return c.inference.batch; }));
    k.push_back(custom_size("net.height", [](RunConfig& c) -> std::size_t& { return c.net.height; }));
    k.push_back(custom_size("net.width", [](RunConfig& c) -> std::size_t& { return c.net.width; }));
    k.push_back(custom_size("net.frames", [](RunConfig& c) -> std::size_t& { return c.net.frames; }));
    k.push_back({"net.filters",
                 [](RunConfig& c, const std::string& v) {
                   const auto items = split_list(v);
                   if (items.size() != arch::kSearchBlocks) throw std::invalid_argument("net.filters needs 6 values");
                   for (std::size_t i = 0; i < items.size(); ++i) c.net.filters[i] = parse_number<std::size_t>(items[i]);
                 },
                 [](const RunConfig& c) { return join(c.net.filters); }});
    k.push_back({"net.pool_after",
                 [](RunConfig& c, const std::string& v) {
                   const auto items = split_list(v);
                   if (items.size() != arch::kSearchBlocks) throw std::invalid_argument("net.pool_after needs 6 values");
                   for (std::size_t i = 0; i < items.size(); ++i) c.net.pool_after[i] = parse_bool(items[i]);
                 },
                 [](const RunConfig& c) { return join(c.net.pool_after); }});
    k.push_back(custom_size("net.similarity_projection", [](RunConfig& c) -> std::size_t& { return c.net.similarity_projection; }));
    k.push_back(custom_size("net.similarity_features", [](RunConfig& c) -> std::size_t& { return c.net.similarity_features; }));
    k.push_back(custom_size("net.histogram_features", [](RunConfig& c) -> std::size_t& { return c.net.histogram_features; }));
    k.push_back(custom_size("net.hidden", [](RunConfig& c) -> std::size_t& { return c.net.hidden; }));
    k.push_back(custom_double("net.dropout", [](RunConfig& c) -> double& { return c.net.dropout; }));
    k.push_back(custom_double("net.output_bias", [](RunConfig& c) -> double& { return c.net.output_bias; }));
    k.push_back(custom_size("synth.videos", [](RunConfig& c) -> std::size_t& { return c.synth_videos; }));
    k.push_back(custom_size("synth.frames", [](RunConfig& c) -> std::size_t& { return c.synth.total_frames; }));
    k.push_back(custom_size("synth.width", [](RunConfig& c) -> std::size_t& { return c.synth.width; }));
    k.push_back(custom_size("synth.height", [](RunConfig& c) -> std::size_t& { return c.synth.height; }));
    k.push_back(custom_double("synth.mean_shot_length", [](RunConfig& c) -> double& { return c.synth.mean_shot_length; }));
    k.push_back(custom_double("synth.gradual_probability", [](RunConfig& c) -> double& { return c.synth.gradual_probability; }));
    k.push_back(custom_size("synth.fade_min", [](RunConfig& c) -> std::size_t& { return c.synth.fade_min; }));
    k.push_back(custom_size("synth.fade_max", [](RunConfig& c) -> std::size_t& { return c.synth.fade_max; }));
    k.push_back(custom_double("synth.holdout", [](RunConfig& c) -> double& { return c.synth_holdout; }));
    k.push_back(custom_double("synth.validation", [](RunConfig& c) -> double& { return c.synth_validation; }));
    return k;
  }();
  return keys;
}

const Key* find_key(const std::string& name) {
  for (const auto& k : registry()) {
    if (k.name == name) return &k;
  }
  return nullptr;
}

void apply_line(RunConfig& cfg, std::string_view raw, const std::string& where) {
  std::string line(raw);
  if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
  line = trim(line);
  if (line.empty()) return;
  const auto eq = line.find('=');
  if (eq == std::string::npos) throw ConfigError(where + ": expected key = value, got '" + line + "'");
  const std::string key = trim(std::string_view(line).substr(0, eq));
  const std::string value = trim(std::string_view(line).substr(eq + 1));
  const Key* k = find_key(key);
  if (k == nullptr) throw ConfigError(where + ": unknown key '" + key + "'");
  try {
    k->set(cfg, value);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + key + ": " + e.what());
  }
}

}  // namespace

void apply_config_text(RunConfig& cfg, std::string_view text, const std::string& source) {
  std::size_t line_no = 0, pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    ++line_no;
    apply_line(cfg, text.substr(pos, nl - pos), source + ":" + std::to_string(line_no));
    pos = nl + 1;
  }
}

void apply_config_file(RunConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  apply_config_text(cfg, buf.str(), path.string());
}

void apply_override(RunConfig& cfg, std::string_view assignment) { apply_line(cfg, assignment, "override"); }

std::string to_config_text(const RunConfig& cfg) {
  std::string out;
  for (const auto& k : registry()) out += k.name + " = " + k.get(cfg) + "\n";
  return out;
}

nlohmann::json to_json(const RunConfig& cfg) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& k : registry()) j[k.name] = k.get(cfg);
  return j;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> names;
  for (const auto& k : registry()) names.push_back(k.name);
  return names;
}

train::TrainConfig retrain_settings(const RunConfig& cfg) {
  train::TrainConfig t = cfg.train;
  t.seed = cfg.seed;
  return t;
}

train::TrainConfig supernet_settings(const RunConfig& cfg) {
  train::TrainConfig t = cfg.supernet;
  t.lambda1 = cfg.train.lambda1;
  t.lambda2 = cfg.train.lambda2;
  t.sample = cfg.train.sample;
  t.seed = cfg.seed;
  return t;
}

bo::SearchConfig search_settings(const RunConfig& cfg) {
  bo::SearchConfig s = cfg.search;
  s.seed = cfg.seed;
  s.fit.seed = cfg.seed;
  return s;
}

void validate(const RunConfig& cfg) {
  try {
    validate(cfg.net);
    train::validate(retrain_settings(cfg));
    train::validate(supernet_settings(cfg));
    train::validate(cfg.graft);
    if (cfg.search.population == 0) throw std::invalid_argument("search.population must be positive");
    if (cfg.search.init_epochs > cfg.search.epochs) throw std::invalid_argument("search.init_epochs exceeds search.epochs");
    if (cfg.search_genes.empty()) throw std::invalid_argument("search.genes must list at least one gene");
    for (std::size_t g : cfg.search_genes) {
      if (g >= arch::kGenes) throw std::invalid_argument("search.genes entries must be < 7");
    }
    if (cfg.recall_target < 0.0 || cfg.recall_target > 1.0) throw std::invalid_argument("recall_target must lie in [0, 1]");
    if (!(cfg.threshold > 0.0 && cfg.threshold < 1.0)) throw std::invalid_argument("threshold must lie in (0, 1)");
    if (cfg.synth_holdout < 0.0 || cfg.synth_validation < 0.0 || cfg.synth_holdout + cfg.synth_validation >= 1.0) {
      throw std::invalid_argument("synth.holdout + synth.validation must be below 1");
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace autoshot
