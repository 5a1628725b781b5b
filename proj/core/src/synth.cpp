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

#include "autoshot/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace autoshot::annot {

namespace {

void check_spec(const SynthSpec& s) {
  if (s.width == 0 || s.height == 0) throw std::invalid_argument("synth: frame size must be positive");
  if (s.total_frames == 0 && s.shot_count == 0) throw std::invalid_argument("synth: a video needs at least one shot");
  if (s.mean_shot_length < 1.0 || s.shot_length_spread < 0.0 || s.shot_length_spread >= 1.0) {
    throw std::invalid_argument("synth: shot length must be >= 1 with spread in [0, 1)");
  }
  if (s.min_shot_length == 0) throw std::invalid_argument("synth: min_shot_length must be positive");
  if (s.gradual_probability < 0.0 || s.gradual_probability > 1.0) {
    throw std::invalid_argument("synth: gradual_probability must lie in [0, 1]");
  }
  if (s.fade_min == 0 || s.fade_min > s.fade_max) throw std::invalid_argument("synth: need 1 <= fade_min <= fade_max");
  if (s.total_frames != 0 && s.total_frames < s.min_shot_length) {
    throw std::invalid_argument("synth: total_frames shorter than one shot");
  }
}

struct ShotStyle {
  std::array<double, 3> color{};
  std::vector<double> texture;  // height x width, one value per pixel
  double drift_x = 0.0;
  double drift_y = 0.0;
};

ShotStyle make_style(const SynthSpec& spec, const ShotStyle* previous, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> channel(20.0, 235.0);
  ShotStyle s;
  for (int attempt = 0;; ++attempt) {
    for (auto& c : s.color) c = channel(rng);
    if (previous == nullptr || attempt >= 64) break;
    double dist = 0.0;
    for (std::size_t c = 0; c < 3; ++c) dist += std::abs(s.color[c] - previous->color[c]);
    if (dist >= spec.min_color_distance) break;
  }
  std::normal_distribution<double> noise(0.0, spec.texture_stddev);
  s.texture.resize(spec.height * spec.width);
  for (auto& v : s.texture) v = noise(rng);
  std::uniform_real_distribution<double> drift(-spec.max_drift, spec.max_drift);
  s.drift_x = drift(rng);
  s.drift_y = drift(rng);
  return s;
}

// Shot pixel at (x, y) `u` frames after the shot starts; texture wraps.
double shot_value(const SynthSpec& spec, const ShotStyle& s, std::size_t x, std::size_t y, std::size_t c, double u) {
  const auto h = static_cast<std::ptrdiff_t>(spec.height), w = static_cast<std::ptrdiff_t>(spec.width);
  auto wrap = [](std::ptrdiff_t v, std::ptrdiff_t m) { return ((v % m) + m) % m; };
  const auto sx = wrap(static_cast<std::ptrdiff_t>(x) + static_cast<std::ptrdiff_t>(std::lround(s.drift_x * u)), w);
  const auto sy = wrap(static_cast<std::ptrdiff_t>(y) + static_cast<std::ptrdiff_t>(std::lround(s.drift_y * u)), h);
  return s.color[c] + s.texture[static_cast<std::size_t>(sy * w + sx)];
}

}  // namespace

ShotPlan plan_shots(const SynthSpec& spec, std::mt19937_64& rng) {
  check_spec(spec);
  const double lo = std::max(1.0, spec.mean_shot_length * (1.0 - spec.shot_length_spread));
  const double hi = std::max(lo, spec.mean_shot_length * (1.0 + spec.shot_length_spread));
  std::uniform_real_distribution<double> length(lo, hi);
  std::bernoulli_distribution gradual(spec.gradual_probability);
  std::uniform_int_distribution<std::size_t> fade(spec.fade_min, spec.fade_max);

  ShotPlan plan;
  auto& shots = plan.annotation.shots;
  Frame begin = 0;
  const bool by_count = spec.total_frames == 0;
  const auto total = static_cast<Frame>(spec.total_frames);
  const auto min_len = static_cast<Frame>(spec.min_shot_length);
  while (true) {
    const auto len = std::max<Frame>(min_len, static_cast<Frame>(std::lround(length(rng))));
    Frame end = begin + len - 1;
    if (by_count) {
      shots.push_back({begin, end});
      if (shots.size() == spec.shot_count) break;
    } else {
      if (end >= total - 1) {
        shots.push_back({begin, total - 1});
        break;
      }
      shots.push_back({begin, end});
    }
    const bool is_gradual = gradual(rng);
    const Frame blend = is_gradual ? static_cast<Frame>(fade(rng)) : 0;
    const Frame next = end + 1 + blend;
    if (!by_count && next + min_len > total) {
      shots.back().end = total - 1;
      break;
    }
    plan.transitions.push_back({is_gradual ? TransitionKind::kGradual : TransitionKind::kHard, end, end + blend});
    begin = next;
  }
  plan.total_frames = static_cast<std::size_t>(shots.back().end + 1);
  return plan;
}

FrameContainer render_annotated(const ShotAnnotation& ann, std::size_t total_frames, const SynthSpec& style,
                                std::mt19937_64& rng) {
  validate(ann);
  if (ann.shots.empty()) throw std::invalid_argument("synth: a video needs at least one shot");
  if (ann.shots.back().end >= static_cast<Frame>(total_frames)) throw std::invalid_argument("synth: annotation exceeds video length");
  std::vector<ShotStyle> styles;
  for (std::size_t k = 0; k < ann.shots.size(); ++k) styles.push_back(make_style(style, k == 0 ? nullptr : &styles.back(), rng));

  FrameContainer c(static_cast<std::uint32_t>(total_frames), static_cast<std::uint32_t>(style.height),
                   static_cast<std::uint32_t>(style.width));
  std::normal_distribution<double> noise(0.0, style.frame_noise_stddev);
  auto emit = [&](std::size_t t, auto&& value) {
    std::uint8_t* px = c.frame(t);
    for (std::size_t y = 0; y < style.height; ++y) {
      for (std::size_t x = 0; x < style.width; ++x) {
        for (std::size_t ch = 0; ch < 3; ++ch) {
          const double v = value(x, y, ch) + (style.frame_noise_stddev > 0.0 ? noise(rng) : 0.0);
          px[(y * style.width + x) * 3 + ch] = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
        }
      }
    }
  };

  std::size_t k = 0;
  for (std::size_t t = 0; t < total_frames; ++t) {
    const auto f = static_cast<Frame>(t);
    while (k + 1 < ann.shots.size() && f >= ann.shots[k + 1].begin) ++k;
    const Shot& shot = ann.shots[k];
    if (f <= shot.end || k + 1 == ann.shots.size() || f < shot.begin) {
      const double u = static_cast<double>(f - shot.begin);
      emit(t, [&](std::size_t x, std::size_t y, std::size_t ch) { return shot_value(style, styles[k], x, y, ch, u); });
    } else {
      // Inside the gap [end + 1, next.begin - 1]: blend outgoing and incoming.
      const Shot& next = ann.shots[k + 1];
      const double blended = static_cast<double>(next.begin - shot.end - 1);
      const double j = static_cast<double>(f - shot.end);
      const double alpha = j / (blended + 1.0);
      const double u_out = static_cast<double>(f - shot.begin);
      const double u_in = static_cast<double>(f - next.begin);
      emit(t, [&](std::size_t x, std::size_t y, std::size_t ch) {
        return (1.0 - alpha) * shot_value(style, styles[k], x, y, ch, u_out) +
               alpha * shot_value(style, styles[k + 1], x, y, ch, u_in);
      });
    }
  }
  return c;
}

SynthVideo synth_video(const SynthSpec& spec, std::mt19937_64& rng) {
  ShotPlan plan = plan_shots(spec, rng);
  SynthVideo v;
  v.frames = render_annotated(plan.annotation, plan.total_frames, spec, rng);
  v.annotation = std::move(plan.annotation);
  v.plan = std::move(plan.transitions);
  return v;
}

}  // namespace autoshot::annot
