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

#include "commands.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include "autoshot/arch.hpp"
#include "autoshot/bo_search.hpp"
#include "autoshot/checkpoint.hpp"
#include "autoshot/dataset.hpp"
#include "autoshot/flops.hpp"
#include "autoshot/graft.hpp"
#include "autoshot/metrics.hpp"
#include "autoshot/pipeline.hpp"
#include "autoshot/run_config.hpp"
#include "autoshot/thumbnail.hpp"
#include "autoshot/trainer.hpp"
#include "run_dir.hpp"

namespace autoshot::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

RunConfig resolve_config(const CommonOptions& common) {
  RunConfig cfg;
  if (common.config) apply_config_file(cfg, *common.config);
  for (const auto& o : common.overrides) apply_override(cfg, o);
  if (common.jobs == 0) throw ConfigError("--jobs must be at least 1");
  cfg.search.jobs = common.jobs;
  validate(cfg);
  return cfg;
}

arch::ArchCode arch_by_name(const std::string& text) {
  if (text == "reference") return arch::transnetv2_reference();
  if (text == "autoshot_f1") return arch::autoshot_f1();
  if (text == "autoshot_precision") return arch::autoshot_precision();
  return arch::parse_arch(text);
}

// Every training-side command uses the same deterministic split.
CorpusSplit load_split(const fs::path& data, const RunConfig& cfg) {
  return split_corpus(load_corpus(data), cfg.synth_validation, cfg.synth_holdout);
}

train::StepLogger progress(const std::string& stage, std::size_t every = 10) {
  return [stage, every](const train::StepRecord& r) {
    if (r.step % every == 0) std::fprintf(stderr, "%s step %zu loss %.4f\n", stage.c_str(), r.step, r.loss);
  };
}

void require_same_network(const NetworkConfig& expected, const NetworkConfig& stored, const fs::path& ckpt) {
  if (to_json(expected) != to_json(stored)) {
    throw std::runtime_error(ckpt.string() +
                             " was trained with a different network configuration; pass the --config used to train it");
  }
}

json train_stats_json(const train::TrainStats& s) {
  return {{"steps", s.steps}, {"epoch_loss", s.epoch_loss}, {"probe_initial", s.probe_initial}, {"probe_final", s.probe_final}};
}

void save_model_atomically(const fs::path& path, Model& model) {
  write_atomically(path, [&](std::ostream& out) { save_model(out, model); }, true);
}

arch::ArchCode arch_or_search_result(const std::optional<std::string>& arch, const RunDir& run) {
  if (arch) return arch_by_name(*arch);
  const fs::path result = run / "search.json";
  if (!fs::exists(result)) {
    throw std::runtime_error("no --arch given and " + result.string() + " does not exist; run `search` first or pass --arch");
  }
  return arch::parse_arch(read_json_file(result).at("best").get<std::string>());
}

std::vector<double> read_predictions(const fs::path& path) {
  const json j = read_json_file(path);
  const json& p = j.is_object() ? j.at("probabilities") : j;
  if (!p.is_array()) throw std::runtime_error(path.string() + ": expected an array of per-frame probabilities");
  return p.get<std::vector<double>>();
}

}  // namespace

json run_synth(const CommonOptions& common, const SynthOptions& opt) {
  const RunConfig cfg = resolve_config(common);
  const RunDir run(common.run_dir, cfg);
  const fs::path out = opt.out.value_or(run / "data");
  const auto videos = synth_corpus(cfg.synth, cfg.synth_videos, cfg.seed);
  write_corpus(out, videos);

  std::size_t frames = 0, hard = 0, gradual = 0;
  for (const auto& v : videos) {
    frames += v.frames.frames;
    for (const auto& t : annot::derive_transitions(v.annotation)) (t.kind == annot::TransitionKind::kHard ? hard : gradual)++;
  }
  std::fprintf(stderr, "synthesized %zu videos (%zu frames, %zu hard cuts, %zu gradual) into %s\n", videos.size(), frames,
               hard, gradual, out.string().c_str());
  return {{"command", "synth"}, {"videos", videos.size()}, {"frames", frames}, {"hard", hard}, {"gradual", gradual},
          {"dir", out.string()}};
}

json run_train_supernet(const CommonOptions& common, const TrainSupernetOptions& opt) {
  const RunConfig cfg = resolve_config(common);
  const RunDir run(common.run_dir, cfg);
  const auto split = load_split(opt.data, cfg);
  const auto pool = build_shot_pool(split.train, cfg.net);
  SuperNet net = build_supernet(cfg.net, cfg.seed);
  const auto stats = train::train_supernet(net, pool, supernet_settings(cfg), progress("supernet"));
  const fs::path ckpt = run / "supernet.ckpt";
  write_atomically(ckpt, [&](std::ostream& out) { save_supernet(out, net); }, true);
  std::fprintf(stderr, "supernet trained for %zu steps, probe loss %.4f -> %.4f, saved %s\n", stats.steps,
               stats.probe_initial, stats.probe_final, ckpt.string().c_str());
  json j = train_stats_json(stats);
  j["command"] = "train-supernet";
  j["checkpoint"] = ckpt.string();
  return j;
}

json run_search(const CommonOptions& common, const SearchOptions& opt) {
  RunConfig cfg = resolve_config(common);
  const RunDir run(common.run_dir, cfg);
  const fs::path ckpt = opt.supernet.value_or(run / "supernet.ckpt");
  if (!fs::exists(ckpt)) throw std::runtime_error(ckpt.string() + " not found; run `train-supernet` first or pass --supernet");
  SuperNet net = load_supernet_file(ckpt);
  require_same_network(cfg.net, net.config, ckpt);
  const auto split = load_split(opt.data, cfg);
  if (split.validation.empty()) throw std::runtime_error("the validation split is empty; raise synth.validation");

  const auto space = bo::SearchSpace::reduced(cfg.search_genes, arch_by_name(opt.base_arch));
  const fs::path history = run / "history.jsonl";
  if (fs::exists(history)) std::fprintf(stderr, "resuming from %s\n", history.string().c_str());
  const auto result = bo::search(supernet_evaluator(net, split.validation, cfg), space, search_settings(cfg), history,
                                 [](const std::string& w) { std::fprintf(stderr, "warning: %s\n", w.c_str()); });

  const json j = {{"command", "search"},
                  {"best", arch::to_text(result.best)},
                  {"best_score", result.best_score},
                  {"metric", cfg.metric == SearchMetric::kF1 ? "f1" : "precision"},
                  {"evaluations", result.history.size()},
                  {"best_so_far", result.best_so_far},
                  {"exhausted", result.exhausted},
                  {"history", history.string()}};
  write_json_file(run / "search.json", j);
  std::fprintf(stderr, "best %s scores %.4f after %zu evaluations\n", arch::to_text(result.best).c_str(), result.best_score,
               result.history.size());
  return j;
}

json run_retrain(const CommonOptions& common, const RetrainOptions& opt) {
  const RunConfig cfg = resolve_config(common);
  const RunDir run(common.run_dir, cfg);
  const auto code = arch_or_search_result(opt.arch, run);
  const auto split = load_split(opt.data, cfg);
  const auto pool = build_shot_pool(split.train, cfg.net);
  train::TrainStats stats;
  Model model = train::retrain_candidate(code, cfg.net, pool, retrain_settings(cfg), &stats, progress("retrain"));
  const fs::path ckpt = run / "model.ckpt";
  save_model_atomically(ckpt, model);
  std::fprintf(stderr, "retrained %s, probe loss %.4f -> %.4f, saved %s\n", arch::to_text(code).c_str(),
               stats.probe_initial, stats.probe_final, ckpt.string().c_str());
  json j = train_stats_json(stats);
  j["command"] = "retrain";
  j["arch"] = arch::to_text(code);
  j["checkpoint"] = ckpt.string();
  return j;
}

json run_graft(const CommonOptions& common, const GraftOptions& opt) {
  const RunConfig cfg = resolve_config(common);
  const RunDir run(common.run_dir, cfg);
  const auto code = arch_or_search_result(opt.arch, run);
  std::optional<Model> teacher;
  if (opt.teacher) {
    teacher = load_model_file(*opt.teacher);
    require_same_network(cfg.net, teacher->config, *opt.teacher);
  }
  const auto split = load_split(opt.data, cfg);
  const auto pool = build_shot_pool(split.train, cfg.net);
  auto result = train::train_graft_ensemble(code, cfg.net, pool, retrain_settings(cfg), cfg.graft,
                                            teacher ? &*teacher : nullptr, progress("graft"));
  json checkpoints = json::array();
  for (std::size_t i = 0; i < result.models.size(); ++i) {
    const fs::path ckpt = run / ("graft_" + std::to_string(i) + ".ckpt");
    save_model_atomically(ckpt, result.models[i]);
    checkpoints.push_back(ckpt.string());
  }
  json alphas = json::array();
  for (const auto& r : result.last_round) {
    alphas.push_back({{"layer", r.layer}, {"receiver", r.receiver}, {"donor", r.donor}, {"alpha", r.alpha}});
  }
  std::fprintf(stderr, "grafted %zu networks of %s%s\n", result.models.size(), arch::to_text(code).c_str(),
               teacher ? " with distillation" : "");
  return {{"command", "graft"},        {"arch", arch::to_text(code)}, {"epoch_loss", result.epoch_loss},
          {"checkpoints", checkpoints}, {"last_round", alphas},        {"distilled", teacher.has_value()}};
}

json run_eval(const CommonOptions& common, const EvalOptions& opt) {
  const RunConfig cfg = resolve_config(common);
  if (opt.pred || opt.ann) {
    if (!opt.pred || !opt.ann) throw std::runtime_error("eval needs both --pred and --ann (or --model with --data)");
    const auto probabilities = read_predictions(*opt.pred);
    const auto annotation = annot::read_annotation_file(*opt.ann);
    const auto detected = metrics::predictions_to_boundaries(probabilities, cfg.threshold);
    const auto report = metrics::score(detected, annotation, cfg.threshold);
    std::fprintf(stderr, "precision %.4f recall %.4f f1 %.4f (tp %zu fp %zu fn %zu)\n", report.precision, report.recall,
                 report.f1, report.tp, report.fp, report.fn);
    return metrics::to_json(report);
  }
  if (!opt.model || !opt.data) throw std::runtime_error("eval needs --pred with --ann, or --model with --data");

  const RunDir run(common.run_dir, cfg);
  Model model = load_model_file(*opt.model);
  require_same_network(cfg.net, model.config, *opt.model);
  std::vector<LabeledVideo> videos;
  if (opt.split == "all") {
    videos = load_corpus(*opt.data);
  } else {
    auto split = load_split(*opt.data, cfg);
    if (opt.split == "test") videos = std::move(split.test);
    else if (opt.split == "validation") videos = std::move(split.validation);
    else if (opt.split == "train") videos = std::move(split.train);
    else throw std::runtime_error("--split must be train, validation, test or all, got '" + opt.split + "'");
  }
  if (videos.empty()) throw std::runtime_error("the " + opt.split + " split is empty");

  const auto eval = evaluate_corpus(model_forward(model), cfg.net, videos, cfg.inference, cfg.threshold);
  for (std::size_t i = 0; i < videos.size(); ++i) {
    write_json_file(run / "predictions" / (videos[i].name + ".json"),
                    {{"video", videos[i].name}, {"probabilities", eval.predictions[i]}});
  }
  const auto par = metrics::precision_at_recall(score_candidates(eval, videos), cfg.recall_target);
  std::fprintf(stderr, "%zu videos: precision %.4f recall %.4f f1 %.4f; precision %.4f at recall %.2f\n", videos.size(),
               eval.report.precision, eval.report.recall, eval.report.f1, par.precision, cfg.recall_target);
  json j = metrics::to_json(eval.report);
  j["videos"] = videos.size();
  j["precision_at_recall"] = metrics::to_json(par);
  j["recall_target"] = cfg.recall_target;
  write_json_file(run / "eval.json", j);
  return j;
}

json run_flops(const CommonOptions& common, const FlopsOptions& opt) {
  const RunConfig cfg = resolve_config(common);
  const auto code = arch_by_name(opt.arch);
  const auto report = count_flops(code, cfg.net);
  std::fprintf(stderr, "%s at %zux%zu, %zu frames\n", arch::to_text(code).c_str(), cfg.net.width, cfg.net.height,
               cfg.net.frames);
  std::fprintf(stderr, "  %-12s %16s\n", "part", "MACs");
  for (std::size_t i = 0; i < report.blocks.size(); ++i) {
    std::fprintf(stderr, "  block%-7zu %16llu\n", i + 1, static_cast<unsigned long long>(report.blocks[i]));
  }
  std::fprintf(stderr, "  %-12s %16llu\n", "attention", static_cast<unsigned long long>(report.attention));
  std::fprintf(stderr, "  %-12s %16llu\n", "similarity", static_cast<unsigned long long>(report.similarity));
  std::fprintf(stderr, "  %-12s %16llu\n", "head", static_cast<unsigned long long>(report.head));
  std::fprintf(stderr, "  %-12s %16llu (%.2f G)\n", "total", static_cast<unsigned long long>(report.total),
               static_cast<double>(report.total) / 1e9);
  json j = to_json(report);
  j["arch"] = arch::to_text(code);
  return j;
}

json run_thumbs(const CommonOptions& common, const ThumbsOptions& opt) {
  const RunConfig cfg = resolve_config(common);
  const RunDir run(common.run_dir, cfg);
  const auto frames = annot::read_sbdf_file(opt.video);
  std::optional<annot::ShotAnnotation> annotation;
  if (opt.ann) annotation = annot::read_annotation_file(*opt.ann);
  std::optional<std::vector<annot::Frame>> predicted;
  if (opt.pred) {
    predicted.emplace();
    for (const auto& d : metrics::predictions_to_boundaries(read_predictions(*opt.pred), cfg.threshold)) {
      predicted->push_back(d.frame);
    }
  }
  const auto image = annot::render_thumbnail(frames, annotation ? &*annotation : nullptr, predicted ? &*predicted : nullptr);
  const fs::path out = opt.out.value_or(run / (opt.video.stem().string() + ".ppm"));
  write_atomically(out, [&](std::ostream& os) { annot::write_ppm(os, image); }, true);
  std::fprintf(stderr, "wrote %zux%zu sheet of %u frames to %s\n", image.width, image.height, frames.frames,
               out.string().c_str());
  return {{"command", "thumbs"}, {"out", out.string()}, {"width", image.width}, {"height", image.height},
          {"frames", frames.frames}};
}

}  // namespace autoshot::cli
