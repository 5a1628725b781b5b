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

#include "autoshot/thumbnail.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>

namespace autoshot::annot {

namespace {

constexpr std::size_t kGlyphWidth = 3;
constexpr std::size_t kGlyphHeight = 5;
constexpr std::size_t kTextOffset = 1;

const std::array<std::array<std::uint8_t, 5>, 10> kGlyphs{{
    {0b111, 0b101, 0b101, 0b101, 0b111},
    {0b010, 0b110, 0b010, 0b010, 0b111},
    {0b111, 0b001, 0b111, 0b100, 0b111},
    {0b111, 0b001, 0b111, 0b001, 0b111},
    {0b101, 0b101, 0b111, 0b001, 0b001},
    {0b111, 0b100, 0b111, 0b001, 0b111},
    {0b111, 0b100, 0b111, 0b101, 0b111},
    {0b111, 0b001, 0b010, 0b010, 0b010},
    {0b111, 0b101, 0b111, 0b101, 0b111},
    {0b111, 0b101, 0b111, 0b001, 0b111},
}};

void set_pixel(Image& img, std::size_t x, std::size_t y, const Rgb& c) {
  if (x >= img.width || y >= img.height) return;
  std::copy(c.begin(), c.end(), img.rgb.begin() + static_cast<std::ptrdiff_t>((y * img.width + x) * 3));
}

std::size_t text_width(std::size_t number) {
  const std::size_t digits = std::to_string(number).size();
  return digits * (kGlyphWidth + 1) - 1;
}

}  // namespace

const std::array<std::uint8_t, 5>& digit_glyph(int digit) {
  if (digit < 0 || digit > 9) throw std::out_of_range("digit_glyph: not a decimal digit");
  return kGlyphs[static_cast<std::size_t>(digit)];
}

double region_luminance(const Image& img, std::size_t x, std::size_t y, std::size_t w, std::size_t h) {
  const std::size_t x1 = std::min(img.width, x + w);
  const std::size_t y1 = std::min(img.height, y + h);
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t yy = y; yy < y1; ++yy) {
    for (std::size_t xx = x; xx < x1; ++xx) {
      const std::uint8_t* p = img.rgb.data() + (yy * img.width + xx) * 3;
      sum += 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
      ++count;
    }
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

void draw_number(Image& img, std::size_t x, std::size_t y, std::size_t number, const Rgb& color) {
  const std::string text = std::to_string(number);
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto& glyph = digit_glyph(text[i] - '0');
    const std::size_t gx = x + i * (kGlyphWidth + 1);
    for (std::size_t row = 0; row < kGlyphHeight; ++row) {
      for (std::size_t col = 0; col < kGlyphWidth; ++col) {
        if (glyph[row] & (1u << (kGlyphWidth - 1 - col))) set_pixel(img, gx + col, y + row, color);
      }
    }
  }
}

Image render_thumbnail(const FrameContainer& frames, const ShotAnnotation* annotation,
                       const std::vector<Frame>* predictions, const ThumbnailConfig& cfg) {
  validate(frames);
  if (frames.frames == 0) throw std::invalid_argument("render_thumbnail: no frames to render");
  if (cfg.columns == 0 || cfg.cell_width == 0 || cfg.cell_height == 0) {
    throw std::invalid_argument("render_thumbnail: grid sizes must be positive");
  }
  const std::size_t n = frames.frames;
  const std::size_t cols = std::min(cfg.columns, n);
  const std::size_t rows = (n + cfg.columns - 1) / cfg.columns;

  Image img;
  img.width = cols * cfg.cell_width + (cols - 1) * cfg.gutter;
  img.height = rows * cfg.cell_height + (rows - 1) * cfg.gutter;
  img.rgb.resize(img.width * img.height * 3);
  for (std::size_t i = 0; i < img.width * img.height; ++i) std::copy(cfg.background.begin(), cfg.background.end(), img.rgb.begin() + static_cast<std::ptrdiff_t>(i * 3));

  std::set<Frame> truth, predicted;
  if (annotation != nullptr) {
    for (const auto& span : derive_transitions(*annotation)) {
      for (Frame f = span.lo; f <= span.hi; ++f) truth.insert(f);
    }
  }
  if (predictions != nullptr) predicted.insert(predictions->begin(), predictions->end());

  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t ox = (t % cfg.columns) * (cfg.cell_width + cfg.gutter);
    const std::size_t oy = (t / cfg.columns) * (cfg.cell_height + cfg.gutter);
    const auto cell = resize_bilinear(frames.frame(t), frames.height, frames.width, cfg.cell_height, cfg.cell_width);
    for (std::size_t y = 0; y < cfg.cell_height; ++y) {
      std::copy_n(cell.begin() + static_cast<std::ptrdiff_t>(y * cfg.cell_width * 3), cfg.cell_width * 3,
                  img.rgb.begin() + static_cast<std::ptrdiff_t>(((oy + y) * img.width + ox) * 3));
    }

    const bool in_truth = truth.count(static_cast<Frame>(t)) > 0;
    const bool in_pred = predicted.count(static_cast<Frame>(t)) > 0;
    if (in_truth || in_pred) {
      const Rgb& tint = in_truth && in_pred ? kBothAgree : (in_truth ? kGroundTruthOnly : kPredictionOnly);
      for (std::size_t x = 0; x < cfg.cell_width; ++x) {
        set_pixel(img, ox + x, oy, tint);
        set_pixel(img, ox + x, oy + cfg.cell_height - 1, tint);
      }
      for (std::size_t y = 0; y < cfg.cell_height; ++y) {
        set_pixel(img, ox, oy + y, tint);
        set_pixel(img, ox + cfg.cell_width - 1, oy + y, tint);
      }
    }

    if (cfg.frame_numbers) {
      const double lum = region_luminance(img, ox + kTextOffset, oy + kTextOffset, text_width(t), kGlyphHeight);
      draw_number(img, ox + kTextOffset, oy + kTextOffset, t, lum < cfg.luminance_threshold ? kLightDigits : kDarkDigits);
    }
  }
  return img;
}

void write_ppm(std::ostream& out, const Image& img) {
  if (img.rgb.size() != img.width * img.height * 3) throw std::invalid_argument("write_ppm: pixel buffer size mismatch");
  out << "P6\n" << img.width << " " << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.rgb.data()), static_cast<std::streamsize>(img.rgb.size()));
  if (!out) throw std::runtime_error("write_ppm: write failed");
}

void write_ppm_file(const std::filesystem::path& path, const Image& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_ppm(out, img);
}

}  // namespace autoshot::annot
