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

#include "autoshot/sampling.hpp"

#include <algorithm>
#include <stdexcept>

namespace autoshot::train {

arch::ArchCode sample_uniform_path(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> option(0, arch::kOptionsPerBlock - 1);
  std::uniform_int_distribution<std::size_t> depth(0, arch::kAttentionOptions - 1);
  std::array<std::size_t, arch::kGenes> genes{};
  for (std::size_t i = 0; i < arch::kSearchBlocks; ++i) genes[i] = option(rng);
  genes[arch::kSearchBlocks] = depth(rng);
  return arch::ArchCode::from_genes(genes);
}

void append_shots(ShotPool& pool, const annot::FrameContainer& video, const annot::ShotAnnotation& ann,
                  std::size_t height, std::size_t width) {
  annot::validate(ann);
  for (const auto& shot : ann.shots) {
    if (shot.end >= static_cast<annot::Frame>(video.frames)) throw std::invalid_argument("append_shots: shot exceeds video length");
    const auto len = static_cast<std::size_t>(shot.end - shot.begin + 1);
    nn::Tensor t = annot::frames_to_tensor(video, shot.begin, len, height, width);
    pool.push_back({t.reshaped({len, height, width, 3})});
  }
}

namespace {

// Copies frame `index` (clamped) of `clip` into `dst`, scaled by `weight` and
// added to what is already there.
void add_frame(const ShotClip& clip, std::ptrdiff_t index, double weight, double* dst) {
  const auto last = static_cast<std::ptrdiff_t>(clip.length()) - 1;
  const auto i = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(index, 0, last));
  const std::size_t plane = clip.frames.size() / clip.length();
  const double* src = clip.frames.data().data() + i * plane;
  for (std::size_t k = 0; k < plane; ++k) dst[k] += weight * src[k];
}

}  // namespace

TrainSample make_training_sample(const ShotPool& pool, std::mt19937_64& rng, const SampleConfig& cfg) {
  if (pool.size() < 2) throw std::invalid_argument("make_training_sample: shot pool needs at least two shots");
  if (cfg.frames < 4) throw std::invalid_argument("make_training_sample: N_F must be at least 4");
  if (cfg.fade_min == 0 || cfg.fade_min > cfg.fade_max) throw std::invalid_argument("make_training_sample: need 1 <= fade_min <= fade_max");
  const nn::Shape& s0 = pool.front().frames.shape();
  const std::size_t n = cfg.frames, h = s0[1], w = s0[2];

  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  const std::size_t a = pick(rng);
  std::size_t b = pick(rng);
  while (b == a) b = pick(rng);
  const ShotClip& out_clip = pool[a];
  const ShotClip& in_clip = pool[b];

  std::size_t blend = 0;
  if (std::bernoulli_distribution(cfg.gradual_probability)(rng)) {
    blend = std::uniform_int_distribution<std::size_t>(cfg.fade_min, cfg.fade_max)(rng);
    blend = std::min(blend, n - 3);
  }
  // Transition span is [k, k + blend]; keep it inside the middle half if possible.
  const std::size_t k_lo = std::min(n / 4, n - 2 - blend);
  const std::size_t k_hi = std::max(k_lo, std::min(3 * n / 4, n - 2 - blend));
  const std::size_t k = std::uniform_int_distribution<std::size_t>(k_lo, k_hi)(rng);

  // Last pure outgoing frame and first pure incoming frame within their clips.
  const auto out_len = static_cast<std::ptrdiff_t>(out_clip.length());
  const auto in_len = static_cast<std::ptrdiff_t>(in_clip.length());
  const auto out_end = std::uniform_int_distribution<std::ptrdiff_t>(std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(k), out_len - 1), out_len - 1)(rng);
  const auto tail = static_cast<std::ptrdiff_t>(n - k - blend - 1);
  const auto in_begin = std::uniform_int_distribution<std::ptrdiff_t>(0, std::max<std::ptrdiff_t>(0, in_len - tail))(rng);

  TrainSample sample;
  sample.frames = nn::Tensor({1, n, h, w, 3});
  sample.y = nn::Tensor({1, n});
  sample.z = nn::Tensor({1, n});
  const std::size_t plane = h * w * 3;
  const auto kk = static_cast<std::ptrdiff_t>(k);
  const auto bl = static_cast<std::ptrdiff_t>(blend);
  for (std::size_t t = 0; t < n; ++t) {
    const auto tt = static_cast<std::ptrdiff_t>(t);
    double* dst = sample.frames.data().data() + t * plane;
    const std::ptrdiff_t out_index = out_end + (tt - kk);
    const std::ptrdiff_t in_index = in_begin + (tt - kk - bl - 1);
    if (tt <= kk) {
      add_frame(out_clip, out_index, 1.0, dst);
    } else if (tt <= kk + bl) {
      const double alpha = static_cast<double>(tt - kk) / static_cast<double>(blend + 1);
      add_frame(out_clip, out_index, 1.0 - alpha, dst);
      add_frame(in_clip, in_index, alpha, dst);
    } else {
      add_frame(in_clip, in_index, 1.0, dst);
    }
  }
  for (std::size_t t = k; t <= k + blend; ++t) sample.z[t] = 1.0;
  sample.y[(2 * k + blend) / 2] = 1.0;
  sample.transition = {blend == 0 ? annot::TransitionKind::kHard : annot::TransitionKind::kGradual,
                       static_cast<annot::Frame>(k), static_cast<annot::Frame>(k + blend)};
  return sample;
}

Batch make_batch(const ShotPool& pool, std::mt19937_64& rng, const SampleConfig& cfg, std::size_t batch_size) {
  if (batch_size == 0) throw std::invalid_argument("make_batch: batch size must be positive");
  Batch batch;
  for (std::size_t i = 0; i < batch_size; ++i) {
    TrainSample s = make_training_sample(pool, rng, cfg);
    if (i == 0) {
      nn::Shape fs = s.frames.shape();
      fs[0] = batch_size;
      batch.frames = nn::Tensor(fs);
      batch.y = nn::Tensor({batch_size, cfg.frames});
      batch.z = nn::Tensor({batch_size, cfg.frames});
    }
    std::copy(s.frames.data().begin(), s.frames.data().end(), batch.frames.data().begin() + static_cast<std::ptrdiff_t>(i * s.frames.size()));
    std::copy(s.y.data().begin(), s.y.data().end(), batch.y.data().begin() + static_cast<std::ptrdiff_t>(i * cfg.frames));
    std::copy(s.z.data().begin(), s.z.data().end(), batch.z.data().begin() + static_cast<std::ptrdiff_t>(i * cfg.frames));
  }
  return batch;
}

}  // namespace autoshot::train
