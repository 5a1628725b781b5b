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

#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "autoshot/bo_search.hpp"
#include "autoshot/dataset.hpp"
#include "autoshot/graft.hpp"
#include "autoshot/network.hpp"
#include "autoshot/synth.hpp"
#include "autoshot/trainer.hpp"

namespace autoshot {

enum class SearchMetric { kF1, kPrecisionAtRecall };

/// Every hyperparameter of a pipeline run. Defaults follow the published
/// setting (lambda1 = 5, lambda2 = 0.1, A = 0.4, c = 1.0, 10 bins, 3 grafted
/// networks, SGD lr 0.1 momentum 0.9, batch 16, 12 epochs, N_F = 60,
/// population 48, 100 search epochs with 20 initial, recall target 0.71).
struct RunConfig {
  std::uint64_t seed = 0;
  NetworkConfig net;
  train::TrainConfig train;     ///< candidate retraining
  train::TrainConfig supernet;  ///< SuperNet training
  train::GraftConfig graft;
  bo::SearchConfig search;
  std::vector<std::size_t> search_genes{0, 1, 2, 3, 4, 5, 6};  ///< free genes
  SearchMetric metric = SearchMetric::kF1;
  double recall_target = 0.71;
  double threshold = 0.5;
  InferenceConfig inference;
  annot::SynthSpec synth;
  std::size_t synth_videos = 200;
  double synth_holdout = 0.2;  ///< fraction of synthesized videos kept for testing
  double synth_validation = 0.1;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Applies "key = value" lines ('#' starts a comment). Unknown keys and
/// malformed values raise ConfigError naming the line.
void apply_config_text(RunConfig& cfg, std::string_view text, const std::string& source = "config");
void apply_config_file(RunConfig& cfg, const std::filesystem::path& path);
/// Applies a single "key=value" override.
void apply_override(RunConfig& cfg, std::string_view assignment);

/// Every key with its resolved value, one "key = value" line each.
std::string to_config_text(const RunConfig& cfg);
nlohmann::json to_json(const RunConfig& cfg);
std::vector<std::string> config_keys();

/// Stage settings with the shared loss, sampling and seed fields filled in.
train::TrainConfig retrain_settings(const RunConfig& cfg);
train::TrainConfig supernet_settings(const RunConfig& cfg);
bo::SearchConfig search_settings(const RunConfig& cfg);

/// Cross-field checks (network feasibility, positive sizes, ...).
void validate(const RunConfig& cfg);

}  // namespace autoshot
