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

#include "autoshot/dataset.hpp"

#include <algorithm>
#include <stdexcept>

namespace autoshot {

namespace fs = std::filesystem;

void write_corpus(const fs::path& dir, const std::vector<LabeledVideo>& videos) {
  fs::create_directories(dir);
  for (const auto& v : videos) {
    if (v.name.empty()) throw std::invalid_argument("write_corpus: video without a name");
    annot::write_sbdf_file(dir / (v.name + ".sbdf"), v.frames);
    annot::write_annotation_file(dir / (v.name + ".txt"), v.annotation);
  }
}

std::vector<LabeledVideo> load_corpus(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw std::runtime_error("corpus directory not found: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".sbdf") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<LabeledVideo> videos;
  for (const auto& f : files) {
    fs::path ann = f;
    ann.replace_extension(".txt");
    if (!fs::exists(ann)) throw std::runtime_error("missing annotation " + ann.string() + " for " + f.string());
    LabeledVideo v;
    v.name = f.stem().string();
    v.frames = annot::read_sbdf_file(f);
    v.annotation = annot::read_annotation_file(ann);
    if (!v.annotation.shots.empty() && v.annotation.shots.back().end >= static_cast<annot::Frame>(v.frames.frames)) {
      throw std::runtime_error(ann.string() + ": annotation runs past the last frame");
    }
    videos.push_back(std::move(v));
  }
  if (videos.empty()) throw std::runtime_error("no .sbdf videos in " + dir.string());
  return videos;
}

train::ShotPool build_shot_pool(const std::vector<LabeledVideo>& videos, const NetworkConfig& cfg) {
  train::ShotPool pool;
  for (const auto& v : videos) train::append_shots(pool, v.frames, v.annotation, cfg.height, cfg.width);
  return pool;
}

std::vector<double> predict_video(const ForwardFn& forward, const NetworkConfig& cfg, const annot::FrameContainer& video,
                                  const InferenceConfig& inference) {
  if (inference.window < 4 || inference.batch == 0) throw std::invalid_argument("predict_video: window must be >= 4 and batch >= 1");
  const auto total = static_cast<std::int64_t>(video.frames);
  const auto window = static_cast<std::int64_t>(inference.window);
  const std::int64_t stride = window / 2;
  const std::int64_t margin = window / 4;
  std::vector<double> probs(video.frames, 0.0);

  std::vector<std::int64_t> starts;
  for (std::int64_t s = -margin; s + margin < total; s += stride) starts.push_back(s);

  const std::size_t plane = cfg.height * cfg.width * 3;
  for (std::size_t first = 0; first < starts.size(); first += inference.batch) {
    const std::size_t count = std::min(inference.batch, starts.size() - first);
    nn::Tensor batch({count, inference.window, cfg.height, cfg.width, 3});
    for (std::size_t i = 0; i < count; ++i) {
      const nn::Tensor w = annot::frames_to_tensor(video, starts[first + i], inference.window, cfg.height, cfg.width);
      std::copy(w.data().begin(), w.data().end(), batch.data().begin() + static_cast<std::ptrdiff_t>(i * inference.window * plane));
    }
    nn::Graph g;
    ForwardContext ctx(g, inference.phase);
    const NetworkOutput out = forward(ctx, batch);
    const nn::Tensor& y = out.single_frame.value();
    for (std::size_t i = 0; i < count; ++i) {
      const std::int64_t s = starts[first + i];
      for (std::int64_t j = margin; j < margin + stride; ++j) {
        const std::int64_t t = s + j;
        if (t >= 0 && t < total) probs[static_cast<std::size_t>(t)] = y[i * inference.window + static_cast<std::size_t>(j)];
      }
    }
  }
  return probs;
}

CorpusEvaluation evaluate_corpus(const ForwardFn& forward, const NetworkConfig& cfg, const std::vector<LabeledVideo>& videos,
                                 const InferenceConfig& inference, double threshold) {
  CorpusEvaluation eval;
  std::vector<metrics::EvalReport> reports;
  for (const auto& v : videos) {
    auto probs = predict_video(forward, cfg, v.frames, inference);
    auto detections = metrics::predictions_to_boundaries(probs, threshold);
    reports.push_back(metrics::score(detections, v.annotation, threshold));
    eval.scored.push_back({std::move(detections), v.annotation});
    eval.predictions.push_back(std::move(probs));
  }
  eval.report = metrics::combine(reports);
  eval.report.threshold = threshold;
  return eval;
}

std::vector<metrics::ScoredVideo> score_candidates(const CorpusEvaluation& eval, const std::vector<LabeledVideo>& videos,
                                                   double floor) {
  if (eval.predictions.size() != videos.size()) throw std::invalid_argument("score_candidates: prediction/video count mismatch");
  std::vector<metrics::ScoredVideo> out;
  for (std::size_t i = 0; i < videos.size(); ++i) {
    out.push_back({metrics::predictions_to_boundaries(eval.predictions[i], floor), videos[i].annotation});
  }
  return out;
}

}  // namespace autoshot
