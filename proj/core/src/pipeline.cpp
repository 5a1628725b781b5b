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

#include "autoshot/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <random>

namespace autoshot {

std::vector<LabeledVideo> synth_corpus(const annot::SynthSpec& spec, std::size_t count, std::uint64_t seed) {
  std::vector<LabeledVideo> videos;
  for (std::size_t i = 0; i < count; ++i) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), static_cast<std::uint32_t>(i)};
    std::mt19937_64 rng(seq);
    annot::SynthVideo v = annot::synth_video(spec, rng);
    char name[32];
    std::snprintf(name, sizeof name, "v%04zu", i);
    videos.push_back({name, std::move(v.frames), std::move(v.annotation)});
  }
  return videos;
}

CorpusSplit split_corpus(std::vector<LabeledVideo> videos, double validation_fraction, double test_fraction) {
  if (validation_fraction < 0.0 || test_fraction < 0.0 || validation_fraction + test_fraction >= 1.0) {
    throw std::invalid_argument("split_corpus: fractions must be non-negative and sum below 1");
  }
  const auto n = videos.size();
  const auto n_test = static_cast<std::size_t>(std::lround(test_fraction * static_cast<double>(n)));
  const auto n_val = static_cast<std::size_t>(std::lround(validation_fraction * static_cast<double>(n)));
  if (n_test + n_val >= n) throw std::invalid_argument("split_corpus: no videos left for training");
  CorpusSplit s;
  const std::size_t n_train = n - n_val - n_test;
  for (std::size_t i = 0; i < n; ++i) {
    auto& dst = i < n_train ? s.train : (i < n_train + n_val ? s.validation : s.test);
    dst.push_back(std::move(videos[i]));
  }
  return s;
}

double corpus_metric(const ForwardFn& forward, const std::vector<LabeledVideo>& videos, const RunConfig& cfg) {
  const CorpusEvaluation eval = evaluate_corpus(forward, cfg.net, videos, cfg.inference, cfg.threshold);
  if (cfg.metric == SearchMetric::kF1) return eval.report.f1;
  return metrics::precision_at_recall(score_candidates(eval, videos), cfg.recall_target).precision;
}

ForwardFn model_forward(Model& model) {
  return [&model](ForwardContext& ctx, const nn::Tensor& x) { return forward(model, ctx, x); };
}

ForwardFn supernet_forward(SuperNet& net, const arch::ArchCode& path) {
  return [&net, path](ForwardContext& ctx, const nn::Tensor& x) { return forward(net, path, ctx, x); };
}

bo::EvalFn supernet_evaluator(SuperNet& net, const std::vector<LabeledVideo>& validation, const RunConfig& cfg) {
  RunConfig scoring = cfg;
  scoring.inference.phase = nn::Phase::kEvalBatchStats;
  return [&net, &validation, scoring](const arch::ArchCode& code) {
    return corpus_metric(supernet_forward(net, code), validation, scoring);
  };
}

}  // namespace autoshot
