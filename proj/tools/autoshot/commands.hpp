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

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace autoshot::cli {

/// Flags shared by every subcommand.
struct CommonOptions {
  std::optional<std::filesystem::path> config;
  std::vector<std::string> overrides;  ///< "key=value", applied after the file
  std::filesystem::path run_dir = "run";
  std::size_t jobs = 1;
};

struct SynthOptions {
  std::optional<std::filesystem::path> out;  ///< default <run>/data
};

struct TrainSupernetOptions {
  std::filesystem::path data;
};

struct SearchOptions {
  std::filesystem::path data;
  std::optional<std::filesystem::path> supernet;  ///< default <run>/supernet.ckpt
  std::string base_arch = "reference";             ///< fixes genes that are not searched
};

struct RetrainOptions {
  std::filesystem::path data;
  std::optional<std::string> arch;  ///< default: best of <run>/search.json
};

struct GraftOptions {
  std::filesystem::path data;
  std::optional<std::string> arch;
  std::optional<std::filesystem::path> teacher;
};

struct EvalOptions {
  std::optional<std::filesystem::path> pred;
  std::optional<std::filesystem::path> ann;
  std::optional<std::filesystem::path> model;
  std::optional<std::filesystem::path> data;
  std::string split = "test";
};

struct FlopsOptions {
  std::string arch;
};

struct ThumbsOptions {
  std::filesystem::path video;
  std::optional<std::filesystem::path> ann;
  std::optional<std::filesystem::path> pred;
  std::optional<std::filesystem::path> out;  ///< default <run>/<video stem>.ppm
};

/// Each command returns its machine-readable result; progress and the human
/// summary go to stderr.
nlohmann::json run_synth(const CommonOptions& common, const SynthOptions& opt);
nlohmann::json run_train_supernet(const CommonOptions& common, const TrainSupernetOptions& opt);
nlohmann::json run_search(const CommonOptions& common, const SearchOptions& opt);
nlohmann::json run_retrain(const CommonOptions& common, const RetrainOptions& opt);
nlohmann::json run_graft(const CommonOptions& common, const GraftOptions& opt);
nlohmann::json run_eval(const CommonOptions& common, const EvalOptions& opt);
nlohmann::json run_flops(const CommonOptions& common, const FlopsOptions& opt);
nlohmann::json run_thumbs(const CommonOptions& common, const ThumbsOptions& opt);

}  // namespace autoshot::cli
