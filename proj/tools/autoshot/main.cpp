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

// Command-line driver for the shot boundary detection NAS pipeline.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <functional>
#include <iostream>

#include "autoshot/annotation.hpp"
#include "autoshot/run_config.hpp"
#include "commands.hpp"

namespace {

using autoshot::cli::CommonOptions;

void add_common(CLI::App* cmd, CommonOptions& common) {
  cmd->add_option("--config", common.config, "key = value configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--run-dir", common.run_dir, "Directory for outputs and the resolved config")->capture_default_str();
  cmd->add_option("--jobs", common.jobs, "Parallel candidate evaluations during search")->capture_default_str();
  cmd->add_option("overrides", common.overrides, "Configuration overrides as key=value");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Neural architecture search pipeline for shot boundary detection"};
  app.require_subcommand(1);

  CommonOptions common;
  std::function<nlohmann::json()> action;

  autoshot::cli::SynthOptions synth;
  auto* c_synth = app.add_subcommand("synth", "Write a synthetic annotated corpus");
  add_common(c_synth, common);
  c_synth->add_option("--out", synth.out, "Corpus directory (default <run-dir>/data)");
  c_synth->callback([&] { action = [&] { return autoshot::cli::run_synth(common, synth); }; });

  autoshot::cli::TrainSupernetOptions supernet;
  auto* c_supernet = app.add_subcommand("train-supernet", "Train the weight-sharing SuperNet");
  add_common(c_supernet, common);
  c_supernet->add_option("--data", supernet.data, "Corpus directory")->required()->check(CLI::ExistingDirectory);
  c_supernet->callback([&] { action = [&] { return autoshot::cli::run_train_supernet(common, supernet); }; });

  autoshot::cli::SearchOptions search;
  auto* c_search = app.add_subcommand("search", "Bayesian search over SuperNet paths (resumes from history)");
  add_common(c_search, common);
  c_search->add_option("--data", search.data, "Corpus directory")->required()->check(CLI::ExistingDirectory);
  c_search->add_option("--supernet", search.supernet, "SuperNet checkpoint (default <run-dir>/supernet.ckpt)");
  c_search->add_option("--base-arch", search.base_arch, "Architecture supplying genes that are not searched")
      ->capture_default_str();
  c_search->callback([&] { action = [&] { return autoshot::cli::run_search(common, search); }; });

  autoshot::cli::RetrainOptions retrain;
  auto* c_retrain = app.add_subcommand("retrain", "Train one architecture from scratch");
  add_common(c_retrain, common);
  c_retrain->add_option("--data", retrain.data, "Corpus directory")->required()->check(CLI::ExistingDirectory);
  c_retrain->add_option("--arch", retrain.arch, "Architecture text, or reference, autoshot_f1, autoshot_precision (default: search result)");
  c_retrain->callback([&] { action = [&] { return autoshot::cli::run_retrain(common, retrain); }; });

  autoshot::cli::GraftOptions graft;
  auto* c_graft = app.add_subcommand("graft", "Train a grafted ensemble, optionally distilling from a teacher");
  add_common(c_graft, common);
  c_graft->add_option("--data", graft.data, "Corpus directory")->required()->check(CLI::ExistingDirectory);
  c_graft->add_option("--arch", graft.arch, "Architecture text, or reference, autoshot_f1, autoshot_precision (default: search result)");
  c_graft->add_option("--teacher", graft.teacher, "Teacher model checkpoint")->check(CLI::ExistingFile);
  c_graft->callback([&] { action = [&] { return autoshot::cli::run_graft(common, graft); }; });

  autoshot::cli::EvalOptions eval;
  auto* c_eval = app.add_subcommand("eval", "Score predictions or a model against annotations");
  add_common(c_eval, common);
  c_eval->add_option("--pred", eval.pred, "Per-frame probabilities (JSON)")->check(CLI::ExistingFile);
  c_eval->add_option("--ann", eval.ann, "Annotation file")->check(CLI::ExistingFile);
  c_eval->add_option("--model", eval.model, "Model checkpoint")->check(CLI::ExistingFile);
  c_eval->add_option("--data", eval.data, "Corpus directory")->check(CLI::ExistingDirectory);
  c_eval->add_option("--split", eval.split, "train, validation, test or all")->capture_default_str();
  c_eval->callback([&] { action = [&] { return autoshot::cli::run_eval(common, eval); }; });

  autoshot::cli::FlopsOptions flops;
  auto* c_flops = app.add_subcommand("flops", "Count multiply-accumulates of an architecture");
  add_common(c_flops, common);
  c_flops->add_option("--arch", flops.arch, "Architecture text, or reference, autoshot_f1, autoshot_precision")->required();
  c_flops->callback([&] { action = [&] { return autoshot::cli::run_flops(common, flops); }; });

  autoshot::cli::ThumbsOptions thumbs;
  auto* c_thumbs = app.add_subcommand("thumbs", "Render a thumbnail sheet with transition borders");
  add_common(c_thumbs, common);
  c_thumbs->add_option("--video", thumbs.video, "SBDF frame file")->required()->check(CLI::ExistingFile);
  c_thumbs->add_option("--ann", thumbs.ann, "Annotation file")->check(CLI::ExistingFile);
  c_thumbs->add_option("--pred", thumbs.pred, "Per-frame probabilities (JSON)")->check(CLI::ExistingFile);
  c_thumbs->add_option("--out", thumbs.out, "Output PPM (default <run-dir>/<video>.ppm)");
  c_thumbs->callback([&] { action = [&] { return autoshot::cli::run_thumbs(common, thumbs); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help prints and succeeds; real usage errors share the config error code.
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    std::cout << action().dump(2) << std::endl;
    return 0;
  } catch (const autoshot::ConfigError& e) {
    std::fprintf(stderr, "autoshot: configuration error: %s\n", e.what());
    return 2;
  } catch (const autoshot::annot::ParseError& e) {
    std::fprintf(stderr, "autoshot: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "autoshot: error: %s\n", e.what());
    return 1;
  }
}
