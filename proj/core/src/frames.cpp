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

#include "autoshot/frames.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace autoshot::annot {

namespace {

constexpr std::array<char, 4> kMagic{'S', 'B', 'D', 'F'};

void put_u32(std::ostream& out, std::uint32_t v) {
  const char bytes[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                         static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(bytes, 4);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw std::runtime_error("SBDF: truncated header");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

FrameContainer::FrameContainer(std::uint32_t t, std::uint32_t h, std::uint32_t w)
    : frames(t), height(h), width(w), rgb(static_cast<std::size_t>(t) * h * w * 3, 0) {}

void validate(const FrameContainer& c) {
  if (c.rgb.size() != static_cast<std::size_t>(c.frames) * c.height * c.width * 3) {
    throw std::invalid_argument("SBDF: payload has " + std::to_string(c.rgb.size()) + " bytes, expected T*H*W*3 = " +
                                std::to_string(static_cast<std::size_t>(c.frames) * c.height * c.width * 3));
  }
}

void write_sbdf(std::ostream& out, const FrameContainer& c) {
  validate(c);
  out.write(kMagic.data(), kMagic.size());
  put_u32(out, c.frames);
  put_u32(out, c.height);
  put_u32(out, c.width);
  out.write(reinterpret_cast<const char*>(c.rgb.data()), static_cast<std::streamsize>(c.rgb.size()));
  if (!out) throw std::runtime_error("SBDF: write failed");
}

FrameContainer read_sbdf(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) throw std::runtime_error("SBDF: bad magic");
  FrameContainer c;
  c.frames = get_u32(in);
  c.height = get_u32(in);
  c.width = get_u32(in);
  c.rgb.resize(static_cast<std::size_t>(c.frames) * c.height * c.width * 3);
  if (!in.read(reinterpret_cast<char*>(c.rgb.data()), static_cast<std::streamsize>(c.rgb.size()))) {
    throw std::runtime_error("SBDF: payload shorter than T*H*W*3 bytes");
  }
  if (in.peek() != std::char_traits<char>::eof()) throw std::runtime_error("SBDF: trailing bytes after payload");
  return c;
}

void write_sbdf_file(const std::filesystem::path& path, const FrameContainer& c) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_sbdf(out, c);
}

FrameContainer read_sbdf_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return read_sbdf(in);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> resize_bilinear(const std::uint8_t* rgb, std::size_t in_h, std::size_t in_w, std::size_t out_h,
                                          std::size_t out_w) {
  if (in_h == 0 || in_w == 0 || out_h == 0 || out_w == 0) throw std::invalid_argument("resize_bilinear: empty image");
  std::vector<std::uint8_t> out(out_h * out_w * 3);
  const double sy = static_cast<double>(in_h) / static_cast<double>(out_h);
  const double sx = static_cast<double>(in_w) / static_cast<double>(out_w);
  for (std::size_t y = 0; y < out_h; ++y) {
    const double fy = std::clamp((static_cast<double>(y) + 0.5) * sy - 0.5, 0.0, static_cast<double>(in_h - 1));
    const auto y0 = static_cast<std::size_t>(fy);
    const std::size_t y1 = std::min(y0 + 1, in_h - 1);
    const double wy = fy - static_cast<double>(y0);
    for (std::size_t x = 0; x < out_w; ++x) {
      const double fx = std::clamp((static_cast<double>(x) + 0.5) * sx - 0.5, 0.0, static_cast<double>(in_w - 1));
      const auto x0 = static_cast<std::size_t>(fx);
      const std::size_t x1 = std::min(x0 + 1, in_w - 1);
      const double wx = fx - static_cast<double>(x0);
      for (std::size_t c = 0; c < 3; ++c) {
        auto px = [&](std::size_t yy, std::size_t xx) { return static_cast<double>(rgb[(yy * in_w + xx) * 3 + c]); };
        const double top = px(y0, x0) * (1.0 - wx) + px(y0, x1) * wx;
        const double bottom = px(y1, x0) * (1.0 - wx) + px(y1, x1) * wx;
        const double v = top * (1.0 - wy) + bottom * wy;
        out[(y * out_w + x) * 3 + c] = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
      }
    }
  }
  return out;
}

FrameContainer resize_frames(const FrameContainer& c, std::size_t out_h, std::size_t out_w) {
  validate(c);
  FrameContainer r(c.frames, static_cast<std::uint32_t>(out_h), static_cast<std::uint32_t>(out_w));
  for (std::size_t t = 0; t < c.frames; ++t) {
    auto img = resize_bilinear(c.frame(t), c.height, c.width, out_h, out_w);
    std::copy(img.begin(), img.end(), r.frame(t));
  }
  return r;
}

nn::Tensor frames_to_tensor(const FrameContainer& c, std::int64_t first, std::size_t count, std::size_t out_h,
                            std::size_t out_w) {
  validate(c);
  if (c.frames == 0) throw std::invalid_argument("frames_to_tensor: empty video");
  const bool same = out_h == c.height && out_w == c.width;
  nn::Tensor out({1, count, out_h, out_w, 3});
  const std::size_t plane = out_h * out_w * 3;
  for (std::size_t i = 0; i < count; ++i) {
    const auto t = static_cast<std::size_t>(
        std::clamp<std::int64_t>(first + static_cast<std::int64_t>(i), 0, static_cast<std::int64_t>(c.frames) - 1));
    std::vector<std::uint8_t> resized;
    const std::uint8_t* src = c.frame(t);
    if (!same) {
      resized = resize_bilinear(src, c.height, c.width, out_h, out_w);
      src = resized.data();
    }
    double* dst = out.data().data() + i * plane;
    for (std::size_t k = 0; k < plane; ++k) dst[k] = static_cast<double>(src[k]) / 255.0;
  }
  return out;
}

}  // namespace autoshot::annot
