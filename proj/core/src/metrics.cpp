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

#include "autoshot/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace autoshot::metrics {

DetectedBoundaries predictions_to_boundaries(std::span<const double> p, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw std::invalid_argument("decode threshold must lie in (0, 1)");
  DetectedBoundaries out;
  std::size_t t = 0;
  while (t < p.size()) {
    if (p[t] < threshold) {
      ++t;
      continue;
    }
    std::size_t best = t;
    while (t < p.size() && p[t] >= threshold) {
      if (p[t] > p[best]) best = t;
      ++t;
    }
    out.push_back({static_cast<Frame>(best), std::clamp(p[best], 0.0, 1.0)});
  }
  return out;
}

Window match_window(const TransitionSpan& span, Frame tolerance) {
  if (span.kind == annot::TransitionKind::kHard) return {span.lo - tolerance, span.lo + tolerance};
  return {span.lo - tolerance, std::max(span.hi, span.lo + tolerance)};
}

MatchResult match_boundaries(std::span<const Frame> detections, const std::vector<TransitionSpan>& transitions,
                             Frame tolerance) {
  if (!std::is_sorted(detections.begin(), detections.end())) throw std::invalid_argument("detections must be sorted by frame");
  MatchResult r;
  std::vector<bool> used(detections.size(), false);
  std::size_t first_free = 0;
  for (std::size_t k = 0; k < transitions.size(); ++k) {
    const Window w = match_window(transitions[k], tolerance);
    if (k > 0 && match_window(transitions[k - 1], tolerance).hi >= w.lo) ++r.overlapping_windows;
    while (first_free < detections.size() && (used[first_free] || detections[first_free] < w.lo)) ++first_free;
    for (std::size_t d = first_free; d < detections.size() && detections[d] <= w.hi; ++d) {
      if (used[d]) continue;
      used[d] = true;
      r.matches.push_back({d, k});
      break;
    }
  }
  r.tp = r.matches.size();
  r.fp = detections.size() - r.tp;
  r.fn = transitions.size() - r.tp;
  return r;
}

EvalReport make_report(std::size_t tp, std::size_t fp, std::size_t fn, double threshold) {
  EvalReport r;
  r.tp = tp;
  r.fp = fp;
  r.fn = fn;
  r.threshold = threshold;
  r.precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  r.recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  r.f1 = r.precision + r.recall == 0.0 ? 0.0 : 2.0 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

namespace {

std::vector<Frame> frames_of(const DetectedBoundaries& d) {
  std::vector<Frame> f;
  f.reserve(d.size());
  for (const auto& x : d) f.push_back(x.frame);
  return f;
}

}  // namespace

EvalReport score(const DetectedBoundaries& detected, const annot::ShotAnnotation& annotation, double threshold) {
  const auto frames = frames_of(detected);
  const auto m = match_boundaries(frames, annot::derive_transitions(annotation));
  return make_report(m.tp, m.fp, m.fn, threshold);
}

EvalReport combine(const std::vector<EvalReport>& reports) {
  std::size_t tp = 0, fp = 0, fn = 0;
  for (const auto& r : reports) {
    tp += r.tp;
    fp += r.fp;
    fn += r.fn;
  }
  return make_report(tp, fp, fn, reports.empty() ? 0.5 : reports.front().threshold);
}

nlohmann::json to_json(const EvalReport& r) {
  return {{"tp", r.tp}, {"fp", r.fp}, {"fn", r.fn}, {"precision", r.precision},
          {"recall", r.recall}, {"f1", r.f1}, {"threshold", r.threshold}};
}

PrecisionAtRecall precision_at_recall(const std::vector<ScoredVideo>& corpus, double target_recall) {
  if (corpus.empty()) throw std::invalid_argument("precision_at_recall: empty corpus");
  if (target_recall < 0.0 || target_recall > 1.0) throw std::invalid_argument("precision_at_recall: target must lie in [0, 1]");

  std::vector<std::vector<TransitionSpan>> truth;
  std::vector<double> thresholds{std::numeric_limits<double>::infinity()};
  for (const auto& v : corpus) {
    truth.push_back(annot::derive_transitions(v.annotation));
    for (const auto& d : v.detections) thresholds.push_back(d.confidence);
  }
  std::sort(thresholds.begin() + 1, thresholds.end(), std::greater<>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  PrecisionAtRecall result;
  for (double tau : thresholds) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      std::vector<Frame> kept;
      for (const auto& d : corpus[i].detections) {
        if (d.confidence >= tau) kept.push_back(d.frame);
      }
      const auto m = match_boundaries(kept, truth[i]);
      tp += m.tp;
      fp += m.fp;
      fn += m.fn;
    }
    const EvalReport r = make_report(tp, fp, fn, tau);
    result.precision = r.precision;
    result.recall = r.recall;
    result.threshold = tau;
    result.no_detections = tp + fp == 0;
    if (r.recall >= target_recall) {
      result.target_reached = true;
      break;
    }
  }
  return result;
}

nlohmann::json to_json(const PrecisionAtRecall& p) {
  nlohmann::json j = {{"precision", p.precision},
                      {"recall", p.recall},
                      {"target_reached", p.target_reached},
                      {"no_detections", p.no_detections}};
  j["threshold"] = std::isinf(p.threshold) ? nlohmann::json("inf") : nlohmann::json(p.threshold);
  return j;
}

}  // namespace autoshot::metrics
