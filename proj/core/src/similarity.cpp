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

#include "autoshot/similarity.hpp"

#include <algorithm>

#include "autoshot/ops.hpp"

namespace autoshot::nn {

namespace {

std::size_t channel_bin(double v) {
  const auto bins = static_cast<double>(kHistogramBinsPerChannel);
  const double scaled = std::clamp(v, 0.0, 1.0) * bins;
  return std::min(kHistogramBinsPerChannel - 1, static_cast<std::size_t>(scaled));
}

}  // namespace

Tensor rgb_histograms(const Tensor& frames) {
  if (frames.rank() != 5 || frames.dim(4) != 3) {
    throw ShapeError("rgb_histograms: expected [N,T,H,W,3], got " + shape_to_string(frames.shape()));
  }
  const std::size_t n = frames.dim(0), t = frames.dim(1), pixels = frames.dim(2) * frames.dim(3);
  constexpr std::size_t kBins = kHistogramBinsPerChannel * kHistogramBinsPerChannel * kHistogramBinsPerChannel;
  Tensor out({n, t, kBins});
  const double inv = 1.0 / static_cast<double>(pixels);
  for (std::size_t f = 0; f < n * t; ++f) {
    const double* px = frames.data().data() + f * pixels * 3;
    double* h = out.data().data() + f * kBins;
    for (std::size_t p = 0; p < pixels; ++p) {
      const std::size_t bin = (channel_bin(px[3 * p]) * kHistogramBinsPerChannel + channel_bin(px[3 * p + 1])) *
                                  kHistogramBinsPerChannel +
                              channel_bin(px[3 * p + 2]);
      h[bin] += inv;
    }
  }
  return out;
}

Tensor rgb_histogram_similarity(const Tensor& frames, const std::vector<int>& offsets) {
  const Tensor hist = rgb_histograms(frames);
  const std::size_t n = hist.dim(0), t = hist.dim(1), bins = hist.dim(2), k = offsets.size();
  Tensor out({n, t, k});
  const auto last = static_cast<std::ptrdiff_t>(t) - 1;
  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t i = 0; i < t; ++i) {
      const double* hi = hist.data().data() + (b * t + i) * bins;
      for (std::size_t j = 0; j < k; ++j) {
        const auto other = std::clamp(static_cast<std::ptrdiff_t>(i) + offsets[j], std::ptrdiff_t{0}, last);
        const double* ho = hist.data().data() + (b * t + static_cast<std::size_t>(other)) * bins;
        double acc = 0.0;
        for (std::size_t q = 0; q < bins; ++q) acc += std::min(hi[q], ho[q]);
        out[(b * t + i) * k + j] = std::min(acc, 1.0);
      }
    }
  }
  return out;
}

Var learnable_cosine_similarity(Var features, Var w, Var b, const std::vector<int>& offsets) {
  if (features.value().rank() != 3) {
    throw ShapeError("learnable_cosine_similarity: expected [N,T,D], got " + shape_to_string(features.value().shape()));
  }
  return window_cosine_similarity(linear(features, w, b), offsets);
}

}  // namespace autoshot::nn
