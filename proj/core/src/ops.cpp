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

#include "autoshot/ops.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace autoshot::nn {

namespace {

[[noreturn]] void shape_fail(const std::string& op, const std::string& what, std::initializer_list<Shape> shapes) {
  std::string msg = op + ": " + what;
  for (const auto& s : shapes) msg += " " + shape_to_string(s);
  throw ShapeError(msg);
}

void require_rank(const std::string& op, const Tensor& t, std::size_t rank) {
  if (t.rank() != rank) shape_fail(op, "expected rank " + std::to_string(rank) + ", got", {t.shape()});
}

struct Video5 {
  std::size_t n, t, h, w, c;
};

Video5 video_dims(const std::string& op, const Tensor& x) {
  require_rank(op, x, 5);
  const auto& s = x.shape();
  return {s[0], s[1], s[2], s[3], s[4]};
}

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMap = Eigen::Map<RowMatrix>;
using ConstRowMap = Eigen::Map<const RowMatrix>;

RowMap as_matrix(double* p, std::size_t rows, std::size_t cols) {
  return RowMap(p, static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}
ConstRowMap as_matrix(const double* p, std::size_t rows, std::size_t cols) {
  return ConstRowMap(p, static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

/// The [Cin,Cout] slice of tap k in a weight laid out as [taps..., Cin, Cout].
RowMap tap(double* w, std::size_t k, std::size_t cin, std::size_t cout) { return as_matrix(w + k * cin * cout, cin, cout); }
ConstRowMap tap(const double* w, std::size_t k, std::size_t cin, std::size_t cout) {
  return as_matrix(w + k * cin * cout, cin, cout);
}

void add_bias_rows(double* out, std::size_t rows, const double* bias, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) out[r * cols + c] += bias[c];
  }
}

void bias_grad(const double* go, std::size_t rows, double* gb, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) gb[c] += go[r * cols + c];
  }
}

/// Frames padded by one pixel on every side and stacked as rows. Tap
/// (ky, kx) of output row r reads padded row r + ky * (W+2) + kx; a tail of
/// zero rows keeps the reads of the last frame in bounds.
struct PaddedLayout {
  std::size_t frames, h, w;

  std::size_t pw() const { return w + 2; }
  std::size_t plane() const { return (h + 2) * pw(); }
  std::size_t rows() const { return frames * plane(); }
  std::size_t padded_rows() const { return rows() + 2 * pw() + 2; }
  Eigen::Index shift(std::size_t k) const { return static_cast<Eigen::Index>((k / 3) * pw() + k % 3); }
  std::size_t out_row(std::size_t f, std::size_t y, std::size_t x) const { return f * plane() + y * pw() + x; }

  RowMatrix pad(const double* src, std::size_t c) const {
    RowMatrix p = RowMatrix::Zero(static_cast<Eigen::Index>(padded_rows()), static_cast<Eigen::Index>(c));
    for (std::size_t f = 0; f < frames; ++f) {
      for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
          const double* s = src + ((f * h + y) * w + x) * c;
          std::copy(s, s + c, p.data() + (out_row(f, y + 1, x + 1)) * c);
        }
      }
    }
    return p;
  }

  /// Output-aligned rows: valid positions filled, padding rows zero.
  RowMatrix pad_rows(const double* src, std::size_t c) const {
    RowMatrix p = RowMatrix::Zero(static_cast<Eigen::Index>(rows()), static_cast<Eigen::Index>(c));
    for (std::size_t f = 0; f < frames; ++f) {
      for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
          const double* s = src + ((f * h + y) * w + x) * c;
          std::copy(s, s + c, p.data() + out_row(f, y, x) * c);
        }
      }
    }
    return p;
  }

  void unpad(const RowMatrix& p, double* dst, std::size_t c) const {
    for (std::size_t f = 0; f < frames; ++f) {
      for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
          const double* s = p.data() + out_row(f, y, x) * c;
          std::copy(s, s + c, dst + ((f * h + y) * w + x) * c);
        }
      }
    }
  }

  void accumulate_interior(const RowMatrix& p, double* dst, std::size_t c) const {
    for (std::size_t f = 0; f < frames; ++f) {
      for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
          const double* s = p.data() + out_row(f, y + 1, x + 1) * c;
          double* o = dst + ((f * h + y) * w + x) * c;
          for (std::size_t i = 0; i < c; ++i) o[i] += s[i];
        }
      }
    }
  }
};

/// Calls fn(k, dst_row, src_row, rows) for each in-range block of temporal
/// tap k: output frames [t0, t1) of a clip read input frames shifted by
/// (k - 1) * dilation.
template <typename Fn>
void for_each_temporal_tap(std::size_t n, std::size_t t, std::size_t pixels, std::size_t dilation, Fn&& fn) {
  const auto T = static_cast<std::ptrdiff_t>(t);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < 3; ++k) {
      const std::ptrdiff_t shift = (static_cast<std::ptrdiff_t>(k) - 1) * static_cast<std::ptrdiff_t>(dilation);
      const std::ptrdiff_t t0 = std::max<std::ptrdiff_t>(0, -shift);
      const std::ptrdiff_t t1 = std::min(T, T - shift);
      if (t1 <= t0) continue;
      const auto base = i * t;
      fn(k, (base + static_cast<std::size_t>(t0)) * pixels, (base + static_cast<std::size_t>(t0 + shift)) * pixels,
         static_cast<std::size_t>(t1 - t0) * pixels);
    }
  }
}

}  // namespace

BatchNormState make_batch_norm_state(std::size_t channels) {
  BatchNormState s;
  s.running_mean = Tensor::zeros({channels});
  s.running_var = Tensor::ones({channels});
  return s;
}

// ---------------------------------------------------------------------------

// Both convolutions are written as sums of shifted matrix products. The
// spatial one works on a zero-padded copy so that every 3x3 tap is a single
// row offset; rows that fall in the padding are computed and dropped.
Var conv2d_spatial(Var x, Var w, Var b) {
  const Tensor& xv = x.value();
  const Tensor& wv = w.value();
  const Tensor& bv = b.value();
  const auto d = video_dims("conv2d_spatial", xv);
  if (wv.rank() != 4 || wv.dim(0) != 3 || wv.dim(1) != 3 || wv.dim(2) != d.c) {
    shape_fail("conv2d_spatial", "weight must be [3,3,Cin,Cout] matching input; got input/weight", {xv.shape(), wv.shape()});
  }
  const std::size_t cout = wv.dim(3);
  if (bv.rank() != 1 || bv.dim(0) != cout) shape_fail("conv2d_spatial", "bias must be [Cout]; got weight/bias", {wv.shape(), bv.shape()});
  const PaddedLayout lay{d.n * d.t, d.h, d.w};

  const RowMatrix xp = lay.pad(xv.data().data(), d.c);
  RowMatrix op = RowMatrix::Zero(static_cast<Eigen::Index>(lay.rows()), static_cast<Eigen::Index>(cout));
  for (std::size_t k = 0; k < 9; ++k) {
    op.noalias() += xp.middleRows(lay.shift(k), lay.rows()) * tap(wv.data().data(), k, d.c, cout);
  }
  Tensor out({d.n, d.t, d.h, d.w, cout});
  lay.unpad(op, out.data().data(), cout);
  add_bias_rows(out.data().data(), out.size() / cout, bv.data().data(), cout);

  return x.graph().record("conv2d_spatial", std::move(out), {x, w, b}, [x, w, b, d, cout, lay](const Tensor& go) {
    Graph& g = x.graph();
    const RowMatrix gp = lay.pad_rows(go.data().data(), cout);
    if (b.requires_grad()) bias_grad(go.data().data(), go.size() / cout, g.grad_ref(b).data().data(), cout);
    if (w.requires_grad()) {
      const RowMatrix xp = lay.pad(x.value().data().data(), d.c);
      double* gw = g.grad_ref(w).data().data();
      for (std::size_t k = 0; k < 9; ++k) {
        tap(gw, k, d.c, cout).noalias() += xp.middleRows(lay.shift(k), lay.rows()).transpose() * gp;
      }
    }
    if (x.requires_grad()) {
      RowMatrix gxp = RowMatrix::Zero(static_cast<Eigen::Index>(lay.padded_rows()), static_cast<Eigen::Index>(d.c));
      const double* wd = w.value().data().data();
      for (std::size_t k = 0; k < 9; ++k) {
        gxp.middleRows(lay.shift(k), lay.rows()).noalias() += gp * tap(wd, k, d.c, cout).transpose();
      }
      lay.accumulate_interior(gxp, g.grad_ref(x).data().data(), d.c);
    }
  });
}

Var conv1d_temporal(Var x, Var w, Var b, std::size_t dilation) {
  if (dilation < 1) throw std::invalid_argument("conv1d_temporal: dilation must be >= 1");
  const Tensor& xv = x.value();
  const Tensor& wv = w.value();
  const Tensor& bv = b.value();
  const auto d = video_dims("conv1d_temporal", xv);
  if (wv.rank() != 3 || wv.dim(0) != 3 || wv.dim(1) != d.c) {
    shape_fail("conv1d_temporal", "weight must be [3,Cin,Cout] matching input; got input/weight", {xv.shape(), wv.shape()});
  }
  const std::size_t cout = wv.dim(2);
  if (bv.rank() != 1 || bv.dim(0) != cout) shape_fail("conv1d_temporal", "bias must be [Cout]; got weight/bias", {wv.shape(), bv.shape()});
  const std::size_t cin = d.c;
  const std::size_t pixels = d.h * d.w;

  Tensor out({d.n, d.t, d.h, d.w, cout});
  add_bias_rows(out.data().data(), out.size() / cout, bv.data().data(), cout);
  const auto X = as_matrix(xv.data().data(), d.n * d.t * pixels, cin);
  auto O = as_matrix(out.data().data(), d.n * d.t * pixels, cout);
  for_each_temporal_tap(d.n, d.t, pixels, dilation, [&](std::size_t k, std::size_t dst, std::size_t src, std::size_t rows) {
    O.middleRows(dst, rows).noalias() += X.middleRows(src, rows) * tap(wv.data().data(), k, cin, cout);
  });

  return x.graph().record("conv1d_temporal", std::move(out), {x, w, b}, [x, w, b, d, cin, cout, pixels, dilation](const Tensor& go) {
    Graph& g = x.graph();
    const std::size_t rows_total = d.n * d.t * pixels;
    const auto G = as_matrix(go.data().data(), rows_total, cout);
    const auto X = as_matrix(x.value().data().data(), rows_total, cin);
    const double* wd = w.value().data().data();
    if (b.requires_grad()) bias_grad(go.data().data(), rows_total, g.grad_ref(b).data().data(), cout);
    double* gw = w.requires_grad() ? g.grad_ref(w).data().data() : nullptr;
    double* gx_data = x.requires_grad() ? g.grad_ref(x).data().data() : nullptr;
    for_each_temporal_tap(d.n, d.t, pixels, dilation, [&](std::size_t k, std::size_t dst, std::size_t src, std::size_t rows) {
      if (gw) tap(gw, k, cin, cout).noalias() += X.middleRows(src, rows).transpose() * G.middleRows(dst, rows);
      if (gx_data) {
        as_matrix(gx_data, rows_total, cin).middleRows(src, rows).noalias() +=
            G.middleRows(dst, rows) * tap(wd, k, cin, cout).transpose();
      }
    });
  });
}

// ---------------------------------------------------------------------------

Var batch_norm(Var x, Var gamma, Var beta, BatchNormState& state, Phase phase) {
  const Tensor& xv = x.value();
  if (xv.rank() < 1) shape_fail("batch_norm", "input needs a channel axis, got", {xv.shape()});
  const std::size_t c = xv.shape().back();
  if (c == 0) shape_fail("batch_norm", "zero-size channel axis", {xv.shape()});
  if (gamma.value().shape() != Shape{c} || beta.value().shape() != Shape{c}) {
    shape_fail("batch_norm", "gamma/beta must be [C]; got input/gamma/beta", {xv.shape(), gamma.value().shape(), beta.value().shape()});
  }
  if (state.running_mean.shape() != Shape{c} || state.running_var.shape() != Shape{c}) {
    shape_fail("batch_norm", "running statistics must be [C]; got input/mean", {xv.shape(), state.running_mean.shape()});
  }
  const std::size_t m = xv.size() / c;
  const double eps = state.epsilon;
  const bool batch_stats = phase != Phase::kEval;

  std::vector<double> mean(c, 0.0), var(c, 0.0);
  if (batch_stats) {
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t k = 0; k < c; ++k) mean[k] += xv[i * c + k];
    for (auto& v : mean) v /= static_cast<double>(m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t k = 0; k < c; ++k) {
        const double dv = xv[i * c + k] - mean[k];
        var[k] += dv * dv;
      }
    for (auto& v : var) v /= static_cast<double>(m);
    if (phase == Phase::kTrain) {
      for (std::size_t k = 0; k < c; ++k) {
        state.running_mean[k] = state.momentum * state.running_mean[k] + (1.0 - state.momentum) * mean[k];
        state.running_var[k] = state.momentum * state.running_var[k] + (1.0 - state.momentum) * var[k];
      }
    }
  } else {
    for (std::size_t k = 0; k < c; ++k) {
      mean[k] = state.running_mean[k];
      var[k] = state.running_var[k];
    }
  }

  std::vector<double> inv_std(c);
  for (std::size_t k = 0; k < c; ++k) inv_std[k] = 1.0 / std::sqrt(var[k] + eps);

  Tensor xhat(xv.shape());
  Tensor out(xv.shape());
  const Tensor& gv = gamma.value();
  const Tensor& bv = beta.value();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < c; ++k) {
      const double h = (xv[i * c + k] - mean[k]) * inv_std[k];
      xhat[i * c + k] = h;
      out[i * c + k] = gv[k] * h + bv[k];
    }
  }

  return x.graph().record(
      "batch_norm", std::move(out), {x, gamma, beta},
      [x, gamma, beta, xhat = std::move(xhat), inv_std = std::move(inv_std), c, m, batch_stats](const Tensor& go) {
        Graph& g = x.graph();
        const Tensor& gv = gamma.value();
        std::vector<double> sum_dy(c, 0.0), sum_dy_xhat(c, 0.0);
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t k = 0; k < c; ++k) {
            sum_dy[k] += go[i * c + k];
            sum_dy_xhat[k] += go[i * c + k] * xhat[i * c + k];
          }
        if (gamma.requires_grad()) {
          Tensor& gg = g.grad_ref(gamma);
          for (std::size_t k = 0; k < c; ++k) gg[k] += sum_dy_xhat[k];
        }
        if (beta.requires_grad()) {
          Tensor& gb = g.grad_ref(beta);
          for (std::size_t k = 0; k < c; ++k) gb[k] += sum_dy[k];
        }
        if (!x.requires_grad()) return;
        Tensor& gx = g.grad_ref(x);
        const double md = static_cast<double>(m);
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t k = 0; k < c; ++k) {
            const double dy = go[i * c + k];
            if (batch_stats) {
              gx[i * c + k] += gv[k] * inv_std[k] / md * (md * dy - sum_dy[k] - xhat[i * c + k] * sum_dy_xhat[k]);
            } else {
              gx[i * c + k] += gv[k] * inv_std[k] * dy;
            }
          }
        }
      });
}

Var relu(Var x) {
  Tensor out = x.value();
  // NaN passes through so a diverged network is noticed downstream.
  for (auto& v : out.data()) v = v < 0.0 ? 0.0 : v;
  return x.graph().record("relu", std::move(out), {x}, [x](const Tensor& go) {
    const Tensor& xv = x.value();
    Tensor& gx = x.graph().grad_ref(x);
    for (std::size_t i = 0; i < go.size(); ++i)
      if (xv[i] > 0.0) gx[i] += go[i];
  });
}

Var sigmoid(Var x) {
  Tensor out = x.value();
  for (auto& v : out.data()) v = 1.0 / (1.0 + std::exp(-v));
  Tensor saved = out;
  return x.graph().record("sigmoid", std::move(out), {x}, [x, saved = std::move(saved)](const Tensor& go) {
    Tensor& gx = x.graph().grad_ref(x);
    for (std::size_t i = 0; i < go.size(); ++i) gx[i] += go[i] * saved[i] * (1.0 - saved[i]);
  });
}

Var dropout(Var x, double rate, Phase phase, std::mt19937_64& rng) {
  if (rate < 0.0 || rate >= 1.0) throw std::invalid_argument("dropout: rate must be in [0, 1)");
  if (phase != Phase::kTrain || rate == 0.0) return x;
  const double keep = 1.0 - rate;
  std::bernoulli_distribution coin(keep);
  Tensor mask(x.value().shape());
  for (auto& v : mask.data()) v = coin(rng) ? 1.0 / keep : 0.0;
  Tensor out = x.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= mask[i];
  return x.graph().record("dropout", std::move(out), {x}, [x, mask = std::move(mask)](const Tensor& go) {
    Tensor& gx = x.graph().grad_ref(x);
    for (std::size_t i = 0; i < go.size(); ++i) gx[i] += go[i] * mask[i];
  });
}

// ---------------------------------------------------------------------------

Var add(Var x, Var y) {
  const Tensor& xv = x.value();
  const Tensor& yv = y.value();
  if (!xv.same_shape(yv)) shape_fail("add", "operand shapes differ:", {xv.shape(), yv.shape()});
  Tensor out = xv;
  out += yv;
  return x.graph().record("add", std::move(out), {x, y}, [x, y](const Tensor& go) {
    Graph& g = x.graph();
    if (x.requires_grad()) g.grad_ref(x) += go;
    if (y.requires_grad()) g.grad_ref(y) += go;
  });
}

Var scale(Var x, double factor) {
  Tensor out = x.value();
  out *= factor;
  return x.graph().record("scale", std::move(out), {x}, [x, factor](const Tensor& go) {
    Tensor& gx = x.graph().grad_ref(x);
    for (std::size_t i = 0; i < go.size(); ++i) gx[i] += factor * go[i];
  });
}

Var sum(Var x) {
  double s = 0.0;
  for (double v : x.value().data()) s += v;
  return x.graph().record("sum", Tensor({1}, s), {x}, [x](const Tensor& go) {
    Tensor& gx = x.graph().grad_ref(x);
    for (auto& v : gx.data()) v += go[0];
  });
}

Var reshape(Var x, Shape shape) {
  Tensor out = x.value().reshaped(std::move(shape));
  return x.graph().record("reshape", std::move(out), {x}, [x](const Tensor& go) {
    Tensor& gx = x.graph().grad_ref(x);
    for (std::size_t i = 0; i < go.size(); ++i) gx[i] += go[i];
  });
}

Var concat_channels(const std::vector<Var>& xs) {
  if (xs.empty()) throw std::invalid_argument("concat_channels: no inputs");
  const Shape& s0 = xs[0].value().shape();
  if (s0.empty()) shape_fail("concat_channels", "inputs need a channel axis, got", {s0});
  std::vector<std::size_t> widths;
  std::size_t total = 0;
  for (const auto& v : xs) {
    const Shape& s = v.value().shape();
    if (s.size() != s0.size() || !std::equal(s.begin(), s.end() - 1, s0.begin())) {
      shape_fail("concat_channels", "non-channel dims disagree:", {s0, s});
    }
    widths.push_back(s.back());
    total += s.back();
  }
  Shape out_shape = s0;
  out_shape.back() = total;
  Tensor out(out_shape);
  const std::size_t rows = out.size() / total;
  std::size_t col = 0;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    const Tensor& v = xs[j].value();
    for (std::size_t r = 0; r < rows; ++r)
      std::copy_n(v.data().data() + r * widths[j], widths[j], out.data().data() + r * total + col);
    col += widths[j];
  }
  return xs[0].graph().record("concat_channels", std::move(out), xs, [xs, widths, total, rows](const Tensor& go) {
    std::size_t col = 0;
    for (std::size_t j = 0; j < xs.size(); ++j) {
      if (xs[j].requires_grad()) {
        Tensor& gx = xs[j].graph().grad_ref(xs[j]);
        for (std::size_t r = 0; r < rows; ++r)
          for (std::size_t k = 0; k < widths[j]; ++k) gx[r * widths[j] + k] += go[r * total + col + k];
      }
      col += widths[j];
    }
  });
}

Var pad_channels(Var x, std::size_t channels) {
  const Tensor& xv = x.value();
  const std::size_t c = xv.shape().back();
  if (channels < c) shape_fail("pad_channels", "target " + std::to_string(channels) + " is below input channels", {xv.shape()});
  if (channels == c) return x;
  Shape s = xv.shape();
  s.back() = channels;
  Tensor out(s);
  const std::size_t rows = xv.size() / c;
  for (std::size_t r = 0; r < rows; ++r) std::copy_n(xv.data().data() + r * c, c, out.data().data() + r * channels);
  return x.graph().record("pad_channels", std::move(out), {x}, [x, c, channels, rows](const Tensor& go) {
    Tensor& gx = x.graph().grad_ref(x);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t k = 0; k < c; ++k) gx[r * c + k] += go[r * channels + k];
  });
}

Var avg_pool_spatial(Var x) {
  const Tensor& xv = x.value();
  const auto d = video_dims("avg_pool_spatial", xv);
  if (d.h < 2 || d.w < 2) shape_fail("avg_pool_spatial", "needs H, W >= 2, got", {xv.shape()});
  const std::size_t oh = d.h / 2, ow = d.w / 2;
  Tensor out({d.n, d.t, oh, ow, d.c});
  const std::size_t frames = d.n * d.t;
  for (std::size_t f = 0; f < frames; ++f)
    for (std::size_t y = 0; y < oh; ++y)
      for (std::size_t x0 = 0; x0 < ow; ++x0)
        for (std::size_t k = 0; k < d.c; ++k) {
          double s = 0.0;
          for (std::size_t dy = 0; dy < 2; ++dy)
            for (std::size_t dx = 0; dx < 2; ++dx) s += xv[((f * d.h + 2 * y + dy) * d.w + 2 * x0 + dx) * d.c + k];
          out[((f * oh + y) * ow + x0) * d.c + k] = 0.25 * s;
        }
  return x.graph().record("avg_pool_spatial", std::move(out), {x}, [x, d, oh, ow](const Tensor& go) {
    Tensor& gx = x.graph().grad_ref(x);
    const std::size_t frames = d.n * d.t;
    for (std::size_t f = 0; f < frames; ++f)
      for (std::size_t y = 0; y < oh; ++y)
        for (std::size_t x0 = 0; x0 < ow; ++x0)
          for (std::size_t k = 0; k < d.c; ++k) {
            const double gval = 0.25 * go[((f * oh + y) * ow + x0) * d.c + k];
            for (std::size_t dy = 0; dy < 2; ++dy)
              for (std::size_t dx = 0; dx < 2; ++dx) gx[((f * d.h + 2 * y + dy) * d.w + 2 * x0 + dx) * d.c + k] += gval;
          }
  });
}

Var spatial_mean(Var x) {
  const Tensor& xv = x.value();
  const auto d = video_dims("spatial_mean", xv);
  const std::size_t pixels = d.h * d.w;
  Tensor out({d.n, d.t, d.c});
  for (std::size_t f = 0; f < d.n * d.t; ++f)
    for (std::size_t p = 0; p < pixels; ++p)
      for (std::size_t k = 0; k < d.c; ++k) out[f * d.c + k] += xv[(f * pixels + p) * d.c + k];
  out *= 1.0 / static_cast<double>(pixels);
  return x.graph().record("spatial_mean", std::move(out), {x}, [x, d, pixels](const Tensor& go) {
    Tensor& gx = x.graph().grad_ref(x);
    const double inv = 1.0 / static_cast<double>(pixels);
    for (std::size_t f = 0; f < d.n * d.t; ++f)
      for (std::size_t p = 0; p < pixels; ++p)
        for (std::size_t k = 0; k < d.c; ++k) gx[(f * pixels + p) * d.c + k] += go[f * d.c + k] * inv;
  });
}

// ---------------------------------------------------------------------------

Var linear(Var x, Var w, Var b) {
  const Tensor& xv = x.value();
  const Tensor& wv = w.value();
  const Tensor& bv = b.value();
  if (xv.rank() < 1 || wv.rank() != 2 || wv.dim(0) != xv.shape().back()) {
    shape_fail("linear", "weight must be [Din,Dout] with Din = last input dim; got input/weight", {xv.shape(), wv.shape()});
  }
  const std::size_t din = wv.dim(0), dout = wv.dim(1);
  if (bv.shape() != Shape{dout}) shape_fail("linear", "bias must be [Dout]; got weight/bias", {wv.shape(), bv.shape()});
  const std::size_t rows = xv.size() / din;
  Shape s = xv.shape();
  s.back() = dout;
  Tensor out(s);
  const double* X = xv.data().data();
  const double* W = wv.data().data();
  for (std::size_t r = 0; r < rows; ++r) {
    double* o = out.data().data() + r * dout;
    std::copy_n(bv.data().data(), dout, o);
    for (std::size_t i = 0; i < din; ++i) {
      const double xval = X[r * din + i];
      const double* wr = W + i * dout;
      for (std::size_t j = 0; j < dout; ++j) o[j] += xval * wr[j];
    }
  }
  return x.graph().record("linear", std::move(out), {x, w, b}, [x, w, b, rows, din, dout](const Tensor& go) {
    Graph& g = x.graph();
    const double* X = x.value().data().data();
    const double* W = w.value().data().data();
    double* GX = x.requires_grad() ? g.grad_ref(x).data().data() : nullptr;
    double* GW = w.requires_grad() ? g.grad_ref(w).data().data() : nullptr;
    double* GB = b.requires_grad() ? g.grad_ref(b).data().data() : nullptr;
    for (std::size_t r = 0; r < rows; ++r) {
      const double* gr = go.data().data() + r * dout;
      if (GB)
        for (std::size_t j = 0; j < dout; ++j) GB[j] += gr[j];
      for (std::size_t i = 0; i < din; ++i) {
        const double* wr = W + i * dout;
        if (GX) {
          double acc = 0.0;
          for (std::size_t j = 0; j < dout; ++j) acc += gr[j] * wr[j];
          GX[r * din + i] += acc;
        }
        if (GW) {
          const double xval = X[r * din + i];
          double* gw = GW + i * dout;
          for (std::size_t j = 0; j < dout; ++j) gw[j] += xval * gr[j];
        }
      }
    }
  });
}

Var batched_matmul(Var a, Var b, bool transpose_b) {
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (av.rank() != 3 || bv.rank() != 3 || av.dim(0) != bv.dim(0)) {
    shape_fail("batched_matmul", "expected [N,M,K] and [N,K,P]; got", {av.shape(), bv.shape()});
  }
  const std::size_t n = av.dim(0), m = av.dim(1), k = av.dim(2);
  const std::size_t kb = transpose_b ? bv.dim(2) : bv.dim(1);
  const std::size_t p = transpose_b ? bv.dim(1) : bv.dim(2);
  if (kb != k) shape_fail("batched_matmul", "inner dimensions disagree:", {av.shape(), bv.shape()});
  // b element (kk, pp) of batch i
  auto bidx = [=](std::size_t i, std::size_t kk, std::size_t pp) {
    return transpose_b ? (i * p + pp) * k + kk : (i * k + kk) * p + pp;
  };
  Tensor out({n, m, p});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t r = 0; r < m; ++r)
      for (std::size_t cc = 0; cc < p; ++cc) {
        double s = 0.0;
        for (std::size_t kk = 0; kk < k; ++kk) s += av[(i * m + r) * k + kk] * bv[bidx(i, kk, cc)];
        out[(i * m + r) * p + cc] = s;
      }
  return a.graph().record("batched_matmul", std::move(out), {a, b}, [a, b, n, m, k, p, bidx](const Tensor& go) {
    Graph& g = a.graph();
    const Tensor& av = a.value();
    const Tensor& bv = b.value();
    Tensor* ga = a.requires_grad() ? &g.grad_ref(a) : nullptr;
    Tensor* gb = b.requires_grad() ? &g.grad_ref(b) : nullptr;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t r = 0; r < m; ++r)
        for (std::size_t cc = 0; cc < p; ++cc) {
          const double gval = go[(i * m + r) * p + cc];
          for (std::size_t kk = 0; kk < k; ++kk) {
            if (ga) (*ga)[(i * m + r) * k + kk] += gval * bv[bidx(i, kk, cc)];
            if (gb) (*gb)[bidx(i, kk, cc)] += gval * av[(i * m + r) * k + kk];
          }
        }
  });
}

Var softmax_last(Var x) {
  const Tensor& xv = x.value();
  const std::size_t d = xv.shape().back();
  const std::size_t rows = xv.size() / d;
  Tensor out(xv.shape());
  for (std::size_t r = 0; r < rows; ++r) {
    double mx = xv[r * d];
    for (std::size_t j = 1; j < d; ++j) mx = std::max(mx, xv[r * d + j]);
    double z = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      out[r * d + j] = std::exp(xv[r * d + j] - mx);
      z += out[r * d + j];
    }
    for (std::size_t j = 0; j < d; ++j) out[r * d + j] /= z;
  }
  Tensor saved = out;
  return x.graph().record("softmax_last", std::move(out), {x}, [x, saved = std::move(saved), d, rows](const Tensor& go) {
    Tensor& gx = x.graph().grad_ref(x);
    for (std::size_t r = 0; r < rows; ++r) {
      double dot = 0.0;
      for (std::size_t j = 0; j < d; ++j) dot += go[r * d + j] * saved[r * d + j];
      for (std::size_t j = 0; j < d; ++j) gx[r * d + j] += saved[r * d + j] * (go[r * d + j] - dot);
    }
  });
}

Var window_cosine_similarity(Var f, const std::vector<int>& offsets) {
  const Tensor& fv = f.value();
  if (fv.rank() != 3) shape_fail("window_cosine_similarity", "expected [N,T,D], got", {fv.shape()});
  if (offsets.empty()) throw std::invalid_argument("window_cosine_similarity: empty offset window");
  const std::size_t n = fv.dim(0), t = fv.dim(1), d = fv.dim(2), kk = offsets.size();
  auto partner = [t](std::size_t i, int off) {
    const std::ptrdiff_t j = static_cast<std::ptrdiff_t>(i) + off;
    return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(j, 0, static_cast<std::ptrdiff_t>(t) - 1));
  };
  std::vector<double> norms(n * t, 0.0);
  for (std::size_t r = 0; r < n * t; ++r) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) s += fv[r * d + j] * fv[r * d + j];
    norms[r] = std::sqrt(s);
  }
  Tensor out({n, t, kk});
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t i = 0; i < t; ++i)
      for (std::size_t q = 0; q < kk; ++q) {
        const std::size_t u = b * t + i, v = b * t + partner(i, offsets[q]);
        if (norms[u] == 0.0 || norms[v] == 0.0) continue;
        double dot = 0.0;
        for (std::size_t j = 0; j < d; ++j) dot += fv[u * d + j] * fv[v * d + j];
        out[(b * t + i) * kk + q] = dot / (norms[u] * norms[v]);
      }
  Tensor saved = out;
  return f.graph().record(
      "window_cosine_similarity", std::move(out), {f},
      [f, offsets, saved = std::move(saved), norms = std::move(norms), n, t, d, kk, partner](const Tensor& go) {
        const Tensor& fv = f.value();
        Tensor& gf = f.graph().grad_ref(f);
        for (std::size_t b = 0; b < n; ++b)
          for (std::size_t i = 0; i < t; ++i)
            for (std::size_t q = 0; q < kk; ++q) {
              const std::size_t u = b * t + i, v = b * t + partner(i, offsets[q]);
              if (norms[u] == 0.0 || norms[v] == 0.0) continue;
              const double gval = go[(b * t + i) * kk + q];
              const double cs = saved[(b * t + i) * kk + q];
              const double inv_uv = 1.0 / (norms[u] * norms[v]);
              const double inv_uu = 1.0 / (norms[u] * norms[u]);
              const double inv_vv = 1.0 / (norms[v] * norms[v]);
              for (std::size_t j = 0; j < d; ++j) {
                const double fu = fv[u * d + j], fw = fv[v * d + j];
                gf[u * d + j] += gval * (fw * inv_uv - cs * fu * inv_uu);
                gf[v * d + j] += gval * (fu * inv_uv - cs * fw * inv_vv);
              }
            }
      });
}

Var binary_cross_entropy(Var prob, const Tensor& target, double weight, double clamp) {
  const Tensor& pv = prob.value();
  if (!pv.same_shape(target)) shape_fail("binary_cross_entropy", "prediction/target shapes differ:", {pv.shape(), target.shape()});
  double loss = 0.0;
  for (std::size_t i = 0; i < pv.size(); ++i) {
    const double p = std::clamp(pv[i], clamp, 1.0 - clamp);
    loss -= target[i] * std::log(p) + (1.0 - target[i]) * std::log(1.0 - p);
  }
  loss *= weight;
  return prob.graph().record("binary_cross_entropy", Tensor({1}, loss), {prob}, [prob, target, weight, clamp](const Tensor& go) {
    const Tensor& pv = prob.value();
    Tensor& gp = prob.graph().grad_ref(prob);
    for (std::size_t i = 0; i < pv.size(); ++i) {
      const double p = pv[i];
      if (p < clamp || p > 1.0 - clamp) continue;
      gp[i] += go[0] * weight * (-target[i] / p + (1.0 - target[i]) / (1.0 - p));
    }
  });
}

}  // namespace autoshot::nn
