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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "autoshot/metrics.hpp"
#include "oracles.hpp"

namespace autoshot::metrics {
namespace {

using annot::ShotAnnotation;
using annot::TransitionKind;

// ---------------------------------------------------------------- decoding

TEST(Decode, CollapsesRunsToEarliestMaximum) {
  const std::vector<double> p{0.1, 0.6, 0.9, 0.9, 0.7, 0.2, 0.5, 0.3, 0.8};
  const auto d = predictions_to_boundaries(p, 0.5);
  ASSERT_EQ(d.size(), 3u);
  EXPECT_EQ(d[0], (Detection{2, 0.9}));
  EXPECT_EQ(d[1], (Detection{6, 0.5}));
  EXPECT_EQ(d[2], (Detection{8, 0.8}));
}

TEST(Decode, EmptyAndBelowThreshold) {
  EXPECT_TRUE(predictions_to_boundaries(std::vector<double>{}, 0.5).empty());
  EXPECT_TRUE(predictions_to_boundaries(std::vector<double>{0.1, 0.49}, 0.5).empty());
  EXPECT_EQ(predictions_to_boundaries(std::vector<double>{0.3, 0.3}, 0.2).size(), 1u);
}

TEST(Decode, RejectsThresholdOutsideOpenUnitInterval) {
  const std::vector<double> p{0.5};
  EXPECT_THROW(predictions_to_boundaries(p, 0.0), std::invalid_argument);
  EXPECT_THROW(predictions_to_boundaries(p, 1.0), std::invalid_argument);
  EXPECT_THROW(predictions_to_boundaries(p, std::nan("")), std::invalid_argument);
}

TEST(Decode, RandomRunsMatchBruteForce) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> p(40);
    for (auto& v : p) v = std::round(u(rng) * 10.0) / 10.0;
    const double tau = 0.55;
    std::vector<Detection> expected;
    for (std::size_t t = 0; t < p.size(); ++t) {
      if (p[t] < tau || (t > 0 && p[t - 1] >= tau)) continue;
      std::size_t end = t;
      while (end < p.size() && p[end] >= tau) ++end;
      const auto best = std::max_element(p.begin() + static_cast<long>(t), p.begin() + static_cast<long>(end));
      expected.push_back({best - p.begin(), *best});
    }
    ASSERT_EQ(predictions_to_boundaries(p, tau), expected);
  }
}

TEST(Decode, PlateauTakesEarliestFrame) {
  std::vector<double> p(10, 0.0);
  p[4] = p[5] = p[6] = 0.8;
  const auto d = predictions_to_boundaries(p, 0.5);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0], (Detection{4, 0.8}));
  std::vector<double> single(5, 0.0);
  single[3] = 0.9;
  EXPECT_EQ(predictions_to_boundaries(single, 0.5), (DetectedBoundaries{{3, 0.9}}));
}

TEST(Decode, LowThresholdCanMergeNeighbouringPeaks) {
  // Two peaks joined by a 0.3 ridge: one run at 0.2, two boundaries at 0.5.
  // Recall is therefore not monotone in the decode threshold itself.
  std::vector<double> p(40, 0.0);
  for (std::size_t t = 10; t <= 30; ++t) p[t] = 0.3;
  p[10] = p[30] = 0.9;
  const ShotAnnotation ann{{{0, 10}, {11, 30}, {31, 39}}};
  EXPECT_EQ(predictions_to_boundaries(p, 0.2).size(), 1u);
  EXPECT_EQ(predictions_to_boundaries(p, 0.5).size(), 2u);
  EXPECT_DOUBLE_EQ(score(predictions_to_boundaries(p, 0.2), ann).recall, 0.5);
  EXPECT_DOUBLE_EQ(score(predictions_to_boundaries(p, 0.5), ann).recall, 1.0);
}

TEST(Decode, RaisingConfidenceCutoffNeverIncreasesRecall) {
  // Filtering a fixed set of detections by confidence only removes
  // detections, and the matching is maximum, so recall cannot grow.
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const ShotAnnotation ann{{{0, 19}, {20, 44}, {51, 79}, {80, 99}, {103, 140}}};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> p(141);
    for (auto& v : p) v = u(rng) * u(rng);
    const auto candidates = predictions_to_boundaries(p, 0.05);
    double previous = 2.0;
    for (double tau = 0.05; tau < 1.0; tau += 0.05) {
      DetectedBoundaries kept;
      for (const auto& d : candidates) {
        if (d.confidence >= tau) kept.push_back(d);
      }
      const double recall = score(kept, ann).recall;
      ASSERT_LE(recall, previous) << "trial " << trial << " tau " << tau;
      previous = recall;
    }
  }
}

// ---------------------------------------------------------------- windows

TEST(Windows, HardAndGradual) {
  const auto hard = match_window({TransitionKind::kHard, 72, 72});
  EXPECT_EQ(hard.lo, 70);
  EXPECT_EQ(hard.hi, 74);
  const auto gradual = match_window({TransitionKind::kGradual, 102, 108});
  EXPECT_EQ(gradual.lo, 100);
  EXPECT_EQ(gradual.hi, 108);
  const auto short_gradual = match_window({TransitionKind::kGradual, 10, 11});
  EXPECT_EQ(short_gradual.lo, 8);
  EXPECT_EQ(short_gradual.hi, 12);
}

TEST(Matching, SimpleCases) {
  const std::vector<TransitionSpan> truth{{TransitionKind::kHard, 72, 72}, {TransitionKind::kGradual, 102, 108}};
  const std::vector<Frame> det{71, 105, 150};
  const auto m = match_boundaries(det, truth);
  EXPECT_EQ(m.tp, 2u);
  EXPECT_EQ(m.fp, 1u);
  EXPECT_EQ(m.fn, 0u);

  const std::vector<Frame> edges{69, 75, 99, 109};
  const auto none = match_boundaries(edges, truth);
  EXPECT_EQ(none.tp, 0u);
  EXPECT_EQ(none.fp, 4u);
  EXPECT_EQ(none.fn, 2u);

  const std::vector<Frame> doubled{72, 73};
  const auto one = match_boundaries(doubled, {{TransitionKind::kHard, 72, 72}});
  EXPECT_EQ(one.tp, 1u);
  EXPECT_EQ(one.fp, 1u);
}

TEST(Matching, OverlappingWindowsAreCounted) {
  const std::vector<TransitionSpan> truth{{TransitionKind::kHard, 10, 10}, {TransitionKind::kHard, 13, 13}};
  const std::vector<Frame> det{12};
  const auto m = match_boundaries(det, truth);
  EXPECT_EQ(m.overlapping_windows, 1u);
  EXPECT_EQ(m.tp, 1u);
  EXPECT_EQ(m.fn, 1u);
}

TEST(Matching, RejectsUnsortedDetections) {
  const std::vector<Frame> det{5, 3};
  EXPECT_THROW(match_boundaries(det, {}), std::invalid_argument);
}

std::vector<TransitionSpan> random_truth(std::mt19937_64& rng) {
  std::uniform_int_distribution<Frame> shot(1, 8), gap(0, 6);
  std::bernoulli_distribution hard(0.6);
  ShotAnnotation ann;
  Frame begin = 0;
  for (int k = 0; k < 8; ++k) {
    const Frame end = begin + shot(rng) - 1;
    ann.shots.push_back({begin, end});
    begin = end + 1 + (hard(rng) ? 0 : gap(rng));
  }
  return annot::derive_transitions(ann);
}

TEST(Matching, GreedyEqualsMaximumMatchingOnRandomInstances) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto truth = random_truth(rng);
    const Frame horizon = truth.back().hi + 4;
    std::set<Frame> picked;
    const int n = std::uniform_int_distribution<int>(0, 12)(rng);
    for (int i = 0; i < n; ++i) picked.insert(std::uniform_int_distribution<Frame>(-2, horizon)(rng));
    const std::vector<Frame> det(picked.begin(), picked.end());

    std::vector<std::vector<std::size_t>> adj(truth.size());
    for (std::size_t k = 0; k < truth.size(); ++k) {
      const auto w = match_window(truth[k]);
      for (std::size_t d = 0; d < det.size(); ++d) {
        if (det[d] >= w.lo && det[d] <= w.hi) adj[k].push_back(d);
      }
    }
    const auto m = match_boundaries(det, truth);
    ASSERT_EQ(m.tp, testing::max_bipartite_matching(adj, det.size())) << "trial " << trial;
    ASSERT_EQ(m.tp + m.fp, det.size());
    ASSERT_EQ(m.tp + m.fn, truth.size());

    // Every reported pair is valid and one-to-one.
    std::set<std::size_t> used_d, used_t;
    for (const auto& pair : m.matches) {
      const auto w = match_window(truth[pair.transition]);
      ASSERT_GE(det[pair.detection], w.lo);
      ASSERT_LE(det[pair.detection], w.hi);
      ASSERT_TRUE(used_d.insert(pair.detection).second);
      ASSERT_TRUE(used_t.insert(pair.transition).second);
    }
  }
}

TEST(Matching, ToleranceExamples) {
  const std::vector<Frame> near{74};
  EXPECT_EQ(match_boundaries(near, {{TransitionKind::kHard, 72, 72}}).tp, 1u);
  const std::vector<Frame> inside{105};
  EXPECT_EQ(match_boundaries(inside, {{TransitionKind::kGradual, 102, 108}}).tp, 1u);
  const std::vector<Frame> after{112};
  const auto miss = match_boundaries(after, {{TransitionKind::kGradual, 102, 108}});
  EXPECT_EQ(miss.tp, 0u);
  EXPECT_EQ(miss.fp, 1u);
  EXPECT_EQ(miss.fn, 1u);
}

// ---------------------------------------------------------------- reports

TEST(Reports, Formulas) {
  const auto r = make_report(6, 2, 4, 0.3);
  EXPECT_DOUBLE_EQ(r.precision, 0.75);
  EXPECT_DOUBLE_EQ(r.recall, 0.6);
  EXPECT_DOUBLE_EQ(r.f1, 2.0 * 0.75 * 0.6 / 1.35);
  EXPECT_EQ(r.threshold, 0.3);

  const auto empty = make_report(0, 0, 0);
  EXPECT_EQ(empty.precision, 0.0);
  EXPECT_EQ(empty.recall, 0.0);
  EXPECT_EQ(empty.f1, 0.0);
}

TEST(Reports, ScoreUsesDerivedTransitions) {
  const ShotAnnotation ann{{{0, 72}, {73, 102}, {109, 180}}};
  const DetectedBoundaries det{{73, 0.9}, {104, 0.8}, {140, 0.7}};
  const auto r = score(det, ann, 0.4);
  EXPECT_EQ(r.tp, 2u);
  EXPECT_EQ(r.fp, 1u);
  EXPECT_EQ(r.fn, 0u);
  EXPECT_EQ(r.threshold, 0.4);
}

TEST(Reports, PerfectAndEmptyDetections) {
  const ShotAnnotation ann{{{0, 72}, {73, 102}, {109, 180}}};
  const DetectedBoundaries exact{{72, 1.0}, {102, 1.0}};
  const auto perfect = score(exact, ann);
  EXPECT_EQ(perfect.precision, 1.0);
  EXPECT_EQ(perfect.recall, 1.0);
  EXPECT_EQ(perfect.f1, 1.0);
  const auto none = score({}, ann);
  EXPECT_EQ(none.precision, 0.0);
  EXPECT_EQ(none.recall, 0.0);
  EXPECT_EQ(none.f1, 0.0);
}

TEST(Reports, ScoreIsShiftInvariant) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const auto truth = random_truth(rng);
    ShotAnnotation ann;
    Frame begin = 0;
    for (const auto& span : truth) {
      ann.shots.push_back({begin, span.lo});
      begin = span.hi + 1;
    }
    ann.shots.push_back({begin, begin + 5});
    DetectedBoundaries det;
    for (Frame f = 0; f <= begin; f += std::uniform_int_distribution<Frame>(1, 6)(rng)) det.push_back({f, 0.9});
    const Frame shift = std::uniform_int_distribution<Frame>(1, 500)(rng);
    ShotAnnotation moved = ann;
    for (auto& shot : moved.shots) {
      shot.begin += shift;
      shot.end += shift;
    }
    DetectedBoundaries moved_det = det;
    for (auto& d : moved_det) d.frame += shift;
    const auto a = score(det, ann), b = score(moved_det, moved);
    ASSERT_EQ(a.tp, b.tp);
    ASSERT_EQ(a.fp, b.fp);
    ASSERT_EQ(a.fn, b.fn);
  }
}

TEST(Reports, CombinePoolsCounts) {
  const auto r = combine({make_report(1, 0, 1), make_report(3, 2, 0)});
  EXPECT_EQ(r.tp, 4u);
  EXPECT_EQ(r.fp, 2u);
  EXPECT_EQ(r.fn, 1u);
  EXPECT_DOUBLE_EQ(r.precision, 4.0 / 6.0);
  EXPECT_DOUBLE_EQ(r.recall, 0.8);
  EXPECT_EQ(combine({}).tp, 0u);
}

TEST(Reports, Json) {
  const auto j = to_json(make_report(1, 1, 0, 0.5));
  EXPECT_EQ(j.at("tp"), 1);
  EXPECT_EQ(j.at("fp"), 1);
  EXPECT_EQ(j.at("fn"), 0);
  EXPECT_DOUBLE_EQ(j.at("precision").get<double>(), 0.5);
  EXPECT_DOUBLE_EQ(j.at("recall").get<double>(), 1.0);
  EXPECT_DOUBLE_EQ(j.at("threshold").get<double>(), 0.5);
}

// ---------------------------------------------------------------- precision at recall

TEST(PrecisionAtRecall, StopsAtFirstThresholdReachingTarget) {
  // Two hard cuts; detections sorted by confidence: hit 0.9, miss 0.8, hit 0.6.
  ScoredVideo v;
  v.annotation = {{{0, 9}, {10, 19}, {20, 29}}};
  v.detections = {{9, 0.9}, {15, 0.8}, {19, 0.6}};
  const auto half = precision_at_recall({v}, 0.5);
  EXPECT_TRUE(half.target_reached);
  EXPECT_EQ(half.threshold, 0.9);
  EXPECT_DOUBLE_EQ(half.precision, 1.0);
  EXPECT_DOUBLE_EQ(half.recall, 0.5);

  const auto full = precision_at_recall({v}, 1.0);
  EXPECT_TRUE(full.target_reached);
  EXPECT_EQ(full.threshold, 0.6);
  EXPECT_DOUBLE_EQ(full.precision, 2.0 / 3.0);

  const auto zero = precision_at_recall({v}, 0.0);
  EXPECT_TRUE(zero.target_reached);
  EXPECT_TRUE(std::isinf(zero.threshold));
  EXPECT_TRUE(zero.no_detections);
}

TEST(PrecisionAtRecall, HandComputedStaircase) {
  // Six hard cuts at 10, 20, ..., 60; ten detections in falling confidence,
  // correct (C) or wrong (W) in the order C C W C W C C W W C.
  ScoredVideo v;
  v.annotation = {{{0, 10}, {11, 20}, {21, 30}, {31, 40}, {41, 50}, {51, 60}, {61, 200}}};
  const std::vector<Frame> frames{10, 20, 100, 30, 120, 40, 50, 140, 160, 60};
  for (std::size_t i = 0; i < frames.size(); ++i) v.detections.push_back({frames[i], 0.95 - 0.05 * double(i)});
  std::sort(v.detections.begin(), v.detections.end(), [](const Detection& a, const Detection& b) { return a.frame < b.frame; });

  // After k detections: (tp, fp) = (1,0) (2,0) (2,1) (3,1) (3,2) (4,2) (5,2) (5,3) (5,4) (6,4).
  const auto at_71 = precision_at_recall({v}, 0.71);
  EXPECT_TRUE(at_71.target_reached);
  EXPECT_DOUBLE_EQ(at_71.threshold, 0.95 - 0.05 * 6);
  EXPECT_DOUBLE_EQ(at_71.precision, 5.0 / 7.0);
  EXPECT_DOUBLE_EQ(at_71.recall, 5.0 / 6.0);

  const auto at_half = precision_at_recall({v}, 0.5);
  EXPECT_DOUBLE_EQ(at_half.threshold, 0.95 - 0.05 * 3);
  EXPECT_DOUBLE_EQ(at_half.precision, 0.75);

  const auto at_full = precision_at_recall({v}, 1.0);
  EXPECT_DOUBLE_EQ(at_full.precision, 0.6);
  EXPECT_DOUBLE_EQ(at_full.recall, 1.0);
}

TEST(PrecisionAtRecall, AllCorrectGivesPrecisionOne) {
  ScoredVideo v;
  v.annotation = {{{0, 10}, {11, 20}, {21, 30}, {31, 40}}};
  v.detections = {{10, 0.3}, {20, 0.9}, {30, 0.6}};
  for (double target : {0.2, 0.5, 1.0}) {
    const auto p = precision_at_recall({v}, target);
    if (p.target_reached) EXPECT_EQ(p.precision, 1.0) << target;
  }
}

TEST(PrecisionAtRecall, UnreachableTargetReportsLowestThreshold) {
  ScoredVideo v;
  v.annotation = {{{0, 9}, {10, 19}, {20, 29}}};
  v.detections = {{9, 0.7}};
  const auto p = precision_at_recall({v}, 0.9);
  EXPECT_FALSE(p.target_reached);
  EXPECT_EQ(p.threshold, 0.7);
  EXPECT_DOUBLE_EQ(p.recall, 0.5);
  EXPECT_THROW(precision_at_recall({}, 0.5), std::invalid_argument);
  EXPECT_THROW(precision_at_recall({v}, 1.5), std::invalid_argument);
}

TEST(PrecisionAtRecall, MatchesStaircaseOracle) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> conf(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<ScoredVideo> corpus(3);
    std::vector<double> levels;
    for (auto& v : corpus) {
      const auto truth = random_truth(rng);
      ShotAnnotation ann;
      Frame begin = 0;
      for (const auto& s : truth) {
        ann.shots.push_back({begin, s.lo});
        begin = s.hi + 1;
      }
      ann.shots.push_back({begin, begin + 3});
      v.annotation = ann;
      std::set<Frame> frames;
      for (int i = 0; i < 10; ++i) frames.insert(std::uniform_int_distribution<Frame>(0, begin + 3)(rng));
      for (Frame f : frames) {
        const double c = std::round(conf(rng) * 20.0) / 20.0;
        v.detections.push_back({f, c});
        levels.push_back(c);
      }
    }
    const double target = std::uniform_real_distribution<double>(0.0, 1.0)(rng);

    // Oracle: walk every distinct confidence from the top, scoring each with
    // an independent maximum matching.
    std::sort(levels.begin(), levels.end(), std::greater<>());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    levels.insert(levels.begin(), std::numeric_limits<double>::infinity());
    double expected_tau = levels.back(), expected_precision = 0.0;
    bool reached = false;
    for (double tau : levels) {
      std::size_t tp = 0, kept_total = 0, truth_total = 0;
      for (const auto& v : corpus) {
        const auto spans = annot::derive_transitions(v.annotation);
        std::vector<Frame> kept;
        for (const auto& d : v.detections) {
          if (d.confidence >= tau) kept.push_back(d.frame);
        }
        std::vector<std::vector<std::size_t>> adj(spans.size());
        for (std::size_t k = 0; k < spans.size(); ++k) {
          const auto w = match_window(spans[k]);
          for (std::size_t d = 0; d < kept.size(); ++d) {
            if (kept[d] >= w.lo && kept[d] <= w.hi) adj[k].push_back(d);
          }
        }
        tp += testing::max_bipartite_matching(adj, kept.size());
        kept_total += kept.size();
        truth_total += spans.size();
      }
      const double recall = truth_total == 0 ? 0.0 : double(tp) / double(truth_total);
      expected_tau = tau;
      expected_precision = kept_total == 0 ? 0.0 : double(tp) / double(kept_total);
      if (recall >= target) {
        reached = true;
        break;
      }
    }
    const auto got = precision_at_recall(corpus, target);
    ASSERT_EQ(got.target_reached, reached) << "trial " << trial;
    ASSERT_EQ(got.threshold, expected_tau) << "trial " << trial;
    ASSERT_DOUBLE_EQ(got.precision, expected_precision) << "trial " << trial;
  }
}

TEST(PrecisionAtRecall, JsonWritesInfinityAsString) {
  PrecisionAtRecall p;
  EXPECT_EQ(to_json(p).at("threshold"), "inf");
  p.threshold = 0.25;
  p.target_reached = true;
  const auto j = to_json(p);
  EXPECT_DOUBLE_EQ(j.at("threshold").get<double>(), 0.25);
  EXPECT_EQ(j.at("target_reached"), true);
}

}  // namespace
}  // namespace autoshot::metrics
