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

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "autoshot/annotation.hpp"

namespace autoshot::metrics {

using annot::Frame;
using annot::TransitionSpan;

struct Detection {
  Frame frame = 0;
  double confidence = 0.0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

/// Strictly increasing frames.
using DetectedBoundaries = std::vector<Detection>;

/// Collapses each run of frames with probability >= threshold into one
/// boundary at the run's earliest maximum; confidence is the run maximum.
DetectedBoundaries predictions_to_boundaries(std::span<const double> probabilities, double threshold = 0.5);

inline constexpr Frame kTolerance = 2;

/// Inclusive frame window a detection must fall in to match `span`:
/// [e - 2, e + 2] for a hard cut at e, [lo - 2, max(hi, lo + 2)] for a
/// gradual span.
struct Window {
  Frame lo = 0;
  Frame hi = 0;
};
Window match_window(const TransitionSpan& span, Frame tolerance = kTolerance);

struct Match {
  std::size_t detection = 0;
  std::size_t transition = 0;
};

struct MatchResult {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::vector<Match> matches;
  /// Consecutive transitions whose windows overlap (a detection in the overlap
  /// can serve only one of them).
  std::size_t overlapping_windows = 0;
};

/// One-to-one matching: transitions are visited in frame order and each takes
/// the earliest unmatched detection inside its window. Because windows are
/// ordered by both endpoints this yields a maximum matching.
MatchResult match_boundaries(std::span<const Frame> detections, const std::vector<TransitionSpan>& transitions,
                             Frame tolerance = kTolerance);

struct EvalReport {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double threshold = 0.5;
};

/// Fills precision, recall and f1 from the counts (0 for empty denominators).
EvalReport make_report(std::size_t tp, std::size_t fp, std::size_t fn, double threshold = 0.5);
EvalReport score(const DetectedBoundaries& detected, const annot::ShotAnnotation& annotation, double threshold = 0.5);
EvalReport combine(const std::vector<EvalReport>& reports);

nlohmann::json to_json(const EvalReport& report);

struct ScoredVideo {
  DetectedBoundaries detections;
  annot::ShotAnnotation annotation;
};

struct PrecisionAtRecall {
  double precision = 0.0;
  double recall = 0.0;
  double threshold = std::numeric_limits<double>::infinity();
  bool target_reached = false;
  /// Chosen threshold keeps no detection, so precision is the 0/0 convention.
  bool no_detections = false;
};

/// Sweeps thresholds from +inf down through every distinct confidence and
/// stops at the first whose corpus recall reaches `target_recall`. When none
/// does, reports the lowest threshold with target_reached = false.
PrecisionAtRecall precision_at_recall(const std::vector<ScoredVideo>& corpus, double target_recall);

nlohmann::json to_json(const PrecisionAtRecall& p);

}  // namespace autoshot::metrics
