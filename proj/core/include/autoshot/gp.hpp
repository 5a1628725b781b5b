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

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "autoshot/arch.hpp"

namespace autoshot::bo {

inline constexpr std::size_t kHyperparameters = arch::kGenes + 2;

/// k(a, a') = signal_variance * exp(-sum_g weights[g] * [a_g != a'_g]);
/// observations carry additional i.i.d. noise of variance `noise`.
struct KernelParams {
  double signal_variance = 0.01;
  std::array<double, arch::kGenes> weights{0.3, 0.3, 0.3, 0.3, 0.3, 0.3, 0.3};
  double noise = 1e-4;
};

/// Box constraints of the hyperparameter search.
struct KernelBounds {
  double signal_min = 1e-6, signal_max = 10.0;
  double weight_min = 2.4787521766663585e-3, weight_max = 20.085536923187668;  // e^-6, e^3
  double noise_min = 1e-8, noise_max = 1.0;
};

/// Log-space coordinates: [log signal, log weights..., log noise].
using HyperVector = std::array<double, kHyperparameters>;
HyperVector to_log_space(const KernelParams& p);
KernelParams from_log_space(const HyperVector& v);

std::size_t hamming_distance(const arch::ArchCode& a, const arch::ArchCode& b);

/// Throws std::invalid_argument for negative weights or non-positive signal.
double hamming_kernel(const arch::ArchCode& a, const arch::ArchCode& b, const KernelParams& p);

struct Observation {
  arch::ArchCode arch;
  double score = 0.0;
};

struct Posterior {
  double mean = 0.0;
  double variance = 0.0;
};

/// Gaussian-process regression over architecture codes, conditioned on a set
/// of observations with a constant prior mean.
class GpModel {
 public:
  /// An unconditioned prior.
  GpModel(KernelParams params = {}, double prior_mean = 0.0);

  /// Conditions on `obs`. The noise is escalated by a jitter ladder
  /// 1e-10, 1e-9, ..., 1e-4 if the Cholesky factorization fails; beyond that
  /// std::runtime_error is thrown.
  GpModel(std::vector<Observation> obs, KernelParams params, double prior_mean);

  Posterior posterior(const arch::ArchCode& code) const;
  double log_marginal_likelihood() const { return lml_; }

  const KernelParams& params() const noexcept { return params_; }
  double prior_mean() const noexcept { return prior_mean_; }
  double jitter() const noexcept { return jitter_; }
  const std::vector<Observation>& observations() const noexcept { return obs_; }

 private:
  std::vector<Observation> obs_;
  KernelParams params_;
  double prior_mean_ = 0.0;
  double jitter_ = 0.0;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::VectorXd alpha_;
  double lml_ = 0.0;
};

Eigen::MatrixXd kernel_matrix(const std::vector<arch::ArchCode>& codes, const KernelParams& p);

/// Log marginal likelihood and its gradient with respect to the log-space
/// hyperparameters.
double log_marginal_likelihood(const std::vector<Observation>& obs, const KernelParams& p, double prior_mean,
                               HyperVector* gradient = nullptr);

enum class PriorMean { kEmpirical, kZero };

struct GpFitConfig {
  std::size_t restarts = 8;  ///< the first start is the initial guess
  std::size_t iterations = 60;
  std::uint64_t seed = 0;
  PriorMean prior_mean = PriorMean::kEmpirical;
  KernelBounds bounds;
};

/// Maximizes the log marginal likelihood by multi-start projected gradient
/// ascent with backtracking. The result is never worse than `initial`.
/// Requires at least two observations.
GpModel gp_fit(const std::vector<Observation>& obs, const KernelParams& initial, const GpFitConfig& cfg = {});

/// Posterior probability of exceeding `best`:
/// Phi((mean - best) / sqrt(variance + 1e-12)).
double acquisition(const GpModel& model, const arch::ArchCode& code, double best);

}  // namespace autoshot::bo
