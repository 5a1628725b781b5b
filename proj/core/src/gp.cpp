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

#include "autoshot/gp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace autoshot::bo {

HyperVector to_log_space(const KernelParams& p) {
  HyperVector v{};
  v[0] = std::log(p.signal_variance);
  for (std::size_t g = 0; g < arch::kGenes; ++g) v[1 + g] = std::log(p.weights[g]);
  v[kHyperparameters - 1] = std::log(p.noise);
  return v;
}

KernelParams from_log_space(const HyperVector& v) {
  KernelParams p;
  p.signal_variance = std::exp(v[0]);
  for (std::size_t g = 0; g < arch::kGenes; ++g) p.weights[g] = std::exp(v[1 + g]);
  p.noise = std::exp(v[kHyperparameters - 1]);
  return p;
}

std::size_t hamming_distance(const arch::ArchCode& a, const arch::ArchCode& b) {
  const auto ga = a.genes(), gb = b.genes();
  std::size_t d = 0;
  for (std::size_t g = 0; g < arch::kGenes; ++g) d += ga[g] != gb[g] ? 1 : 0;
  return d;
}

namespace {

void check_params(const KernelParams& p) {
  if (!(p.signal_variance > 0.0)) throw std::invalid_argument("hamming kernel: signal variance must be positive");
  for (double w : p.weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("hamming kernel: gene weights must be non-negative");
  }
  if (!(p.noise >= 0.0)) throw std::invalid_argument("hamming kernel: noise must be non-negative");
}

double kernel_genes(const std::array<std::size_t, arch::kGenes>& a, const std::array<std::size_t, arch::kGenes>& b,
                    const KernelParams& p) {
  double s = 0.0;
  for (std::size_t g = 0; g < arch::kGenes; ++g) {
    if (a[g] != b[g]) s += p.weights[g];
  }
  return p.signal_variance * std::exp(-s);
}

std::vector<std::array<std::size_t, arch::kGenes>> genes_of(const std::vector<Observation>& obs) {
  std::vector<std::array<std::size_t, arch::kGenes>> out;
  out.reserve(obs.size());
  for (const auto& o : obs) out.push_back(o.arch.genes());
  return out;
}

Eigen::MatrixXd signal_matrix(const std::vector<std::array<std::size_t, arch::kGenes>>& genes, const KernelParams& p) {
  const auto n = static_cast<Eigen::Index>(genes.size());
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      k(i, j) = k(j, i) = kernel_genes(genes[static_cast<std::size_t>(i)], genes[static_cast<std::size_t>(j)], p);
    }
  }
  return k;
}

constexpr std::array<double, 7> kJitterLadder{0.0, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6, 1e-5};

// Rounding can leave a tiny positive pivot for a singular matrix (duplicate
// observations without noise); treat such factors as failures.
bool well_conditioned(const Eigen::LLT<Eigen::MatrixXd>& llt, const Eigen::MatrixXd& a) {
  const double scale = a.diagonal().maxCoeff();
  const Eigen::VectorXd pivots = llt.matrixLLT().diagonal();
  return (pivots.array().square() > 1e-12 * scale).all();
}

// Factorizes K + (noise + jitter) I, escalating jitter up to 1e-4.
Eigen::LLT<Eigen::MatrixXd> factorize(const Eigen::MatrixXd& k, double noise, double* jitter_used) {
  std::vector<double> ladder(kJitterLadder.begin(), kJitterLadder.end());
  ladder.push_back(1e-4);
  for (double jitter : ladder) {
    Eigen::MatrixXd a = k;
    a.diagonal().array() += noise + jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() == Eigen::Success && well_conditioned(llt, a)) {
      if (jitter_used != nullptr) *jitter_used = jitter;
      return llt;
    }
  }
  throw std::runtime_error("GP: kernel matrix is not positive definite even with jitter 1e-4");
}

double residual_lml(const Eigen::LLT<Eigen::MatrixXd>& llt, const Eigen::VectorXd& r, Eigen::VectorXd* alpha) {
  Eigen::VectorXd a = llt.solve(r);
  const Eigen::MatrixXd& l = llt.matrixLLT();
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < l.rows(); ++i) logdet += std::log(l(i, i));
  const double n = static_cast<double>(r.size());
  const double lml = -0.5 * r.dot(a) - logdet - 0.5 * n * std::log(2.0 * std::numbers::pi);
  if (alpha != nullptr) *alpha = std::move(a);
  return lml;
}

Eigen::VectorXd residuals(const std::vector<Observation>& obs, double prior_mean) {
  Eigen::VectorXd r(static_cast<Eigen::Index>(obs.size()));
  for (std::size_t i = 0; i < obs.size(); ++i) r(static_cast<Eigen::Index>(i)) = obs[i].score - prior_mean;
  return r;
}

}  // namespace

double hamming_kernel(const arch::ArchCode& a, const arch::ArchCode& b, const KernelParams& p) {
  check_params(p);
  return kernel_genes(a.genes(), b.genes(), p);
}

Eigen::MatrixXd kernel_matrix(const std::vector<arch::ArchCode>& codes, const KernelParams& p) {
  check_params(p);
  std::vector<std::array<std::size_t, arch::kGenes>> genes;
  for (const auto& c : codes) genes.push_back(c.genes());
  return signal_matrix(genes, p);
}

GpModel::GpModel(KernelParams params, double prior_mean) : params_(params), prior_mean_(prior_mean) { check_params(params_); }

GpModel::GpModel(std::vector<Observation> obs, KernelParams params, double prior_mean)
    : obs_(std::move(obs)), params_(params), prior_mean_(prior_mean) {
  check_params(params_);
  if (obs_.empty()) return;
  const Eigen::MatrixXd k = signal_matrix(genes_of(obs_), params_);
  llt_ = factorize(k, params_.noise, &jitter_);
  lml_ = residual_lml(llt_, residuals(obs_, prior_mean_), &alpha_);
}

Posterior GpModel::posterior(const arch::ArchCode& code) const {
  if (obs_.empty()) return {prior_mean_, params_.signal_variance};
  const auto g = code.genes();
  Eigen::VectorXd ks(static_cast<Eigen::Index>(obs_.size()));
  for (std::size_t i = 0; i < obs_.size(); ++i) ks(static_cast<Eigen::Index>(i)) = kernel_genes(g, obs_[i].arch.genes(), params_);
  Posterior p;
  p.mean = prior_mean_ + ks.dot(alpha_);
  const Eigen::VectorXd v = llt_.matrixL().solve(ks);
  p.variance = std::max(0.0, params_.signal_variance - v.squaredNorm());
  return p;
}

double log_marginal_likelihood(const std::vector<Observation>& obs, const KernelParams& p, double prior_mean,
                               HyperVector* gradient) {
  check_params(p);
  if (obs.empty()) throw std::invalid_argument("log_marginal_likelihood: no observations");
  const auto genes = genes_of(obs);
  const Eigen::MatrixXd k = signal_matrix(genes, p);
  double jitter = 0.0;
  const auto llt = factorize(k, p.noise, &jitter);
  Eigen::VectorXd alpha;
  const double lml = residual_lml(llt, residuals(obs, prior_mean), &alpha);
  if (gradient != nullptr) {
    const auto n = static_cast<Eigen::Index>(obs.size());
    // W = alpha alpha^T - K^-1; d lml / d theta = 0.5 tr(W dK/dtheta).
    const Eigen::MatrixXd w = alpha * alpha.transpose() - llt.solve(Eigen::MatrixXd::Identity(n, n));
    auto& grad = *gradient;
    grad.fill(0.0);
    grad[0] = 0.5 * (w.array() * k.array()).sum();
    for (std::size_t g = 0; g < arch::kGenes; ++g) {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
          if (genes[static_cast<std::size_t>(i)][g] != genes[static_cast<std::size_t>(j)][g]) acc += w(i, j) * k(i, j);
        }
      }
      grad[1 + g] = -0.5 * p.weights[g] * acc;
    }
    grad[kHyperparameters - 1] = 0.5 * p.noise * w.trace();
  }
  return lml;
}

namespace {

HyperVector clamp_to_bounds(HyperVector v, const KernelBounds& b) {
  v[0] = std::clamp(v[0], std::log(b.signal_min), std::log(b.signal_max));
  for (std::size_t g = 0; g < arch::kGenes; ++g) v[1 + g] = std::clamp(v[1 + g], std::log(b.weight_min), std::log(b.weight_max));
  v[kHyperparameters - 1] = std::clamp(v[kHyperparameters - 1], std::log(b.noise_min), std::log(b.noise_max));
  return v;
}

double safe_lml(const std::vector<Observation>& obs, const HyperVector& v, double mean, HyperVector* grad) {
  try {
    return log_marginal_likelihood(obs, from_log_space(v), mean, grad);
  } catch (const std::runtime_error&) {
    return -std::numeric_limits<double>::infinity();
  }
}

HyperVector ascend(const std::vector<Observation>& obs, HyperVector v, double mean, const GpFitConfig& cfg, double* best) {
  HyperVector grad{};
  double value = safe_lml(obs, v, mean, &grad);
  double step = 0.5;
  for (std::size_t it = 0; it < cfg.iterations && std::isfinite(value); ++it) {
    double norm = 0.0;
    for (double g : grad) norm += g * g;
    norm = std::sqrt(norm);
    if (norm < 1e-9) break;
    bool improved = false;
    for (int tries = 0; tries < 20; ++tries) {
      HyperVector trial{};
      for (std::size_t i = 0; i < kHyperparameters; ++i) trial[i] = v[i] + step * grad[i] / norm;
      trial = clamp_to_bounds(trial, cfg.bounds);
      HyperVector trial_grad{};
      const double tv = safe_lml(obs, trial, mean, &trial_grad);
      if (tv > value) {
        v = trial;
        value = tv;
        grad = trial_grad;
        step = std::min(step * 2.0, 4.0);
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
  }
  *best = value;
  return v;
}

}  // namespace

GpModel gp_fit(const std::vector<Observation>& obs, const KernelParams& initial, const GpFitConfig& cfg) {
  if (obs.size() < 2) throw std::invalid_argument("gp_fit: at least two observations are required");
  check_params(initial);
  double mean = 0.0;
  if (cfg.prior_mean == PriorMean::kEmpirical) {
    for (const auto& o : obs) mean += o.score;
    mean /= static_cast<double>(obs.size());
  }

  const HyperVector start = to_log_space(initial);
  HyperVector best_v = start;
  double best_lml = safe_lml(obs, start, mean, nullptr);

  std::mt19937_64 rng(cfg.seed);
  const KernelBounds& b = cfg.bounds;
  for (std::size_t r = 0; r < std::max<std::size_t>(1, cfg.restarts); ++r) {
    HyperVector v = start;
    if (r > 0) {
      std::uniform_real_distribution<double> sig(std::log(b.signal_min), std::log(b.signal_max));
      std::uniform_real_distribution<double> wt(std::log(b.weight_min), std::log(b.weight_max));
      std::uniform_real_distribution<double> nz(std::log(b.noise_min), std::log(b.noise_max));
      v[0] = sig(rng);
      for (std::size_t g = 0; g < arch::kGenes; ++g) v[1 + g] = wt(rng);
      v[kHyperparameters - 1] = nz(rng);
    } else {
      v = clamp_to_bounds(v, b);
    }
    double value = 0.0;
    v = ascend(obs, v, mean, cfg, &value);
    if (value > best_lml) {
      best_lml = value;
      best_v = v;
    }
  }
  return GpModel(obs, from_log_space(best_v), mean);
}

double acquisition(const GpModel& model, const arch::ArchCode& code, double best) {
  const Posterior p = model.posterior(code);
  const double z = (p.mean - best) / std::sqrt(p.variance + 1e-12);
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

}  // namespace autoshot::bo
