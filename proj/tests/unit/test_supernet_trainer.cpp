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

#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include "autoshot/checkpoint.hpp"
#include "autoshot/grad_check.hpp"
#include "autoshot/graft.hpp"
#include "autoshot/losses.hpp"
#include "autoshot/network.hpp"
#include "autoshot/optimizer.hpp"
#include "autoshot/sampling.hpp"
#include "autoshot/trainer.hpp"

namespace autoshot {
namespace {

using nn::Tensor;

Tensor randn(nn::Shape s, std::uint64_t seed, double sd = 1.0) {
  std::mt19937_64 rng(seed);
  return Tensor::randn(std::move(s), rng, sd);
}

// -- Losses ----------------------------------------------------------------------

double bce(double p, double t) {
  p = std::clamp(p, kProbabilityClamp, 1.0 - kProbabilityClamp);
  return -(t * std::log(p) + (1.0 - t) * std::log(1.0 - p));
}

TEST(Loss, MultiheadMatchesFormula) {
  const Tensor yh({1, 4}, std::vector<double>{0.1, 0.8, 0.3, 0.05});
  const Tensor zh({1, 4}, std::vector<double>{0.2, 0.9, 0.6, 0.1});
  const Tensor y({1, 4}, std::vector<double>{0, 1, 0, 0});
  const Tensor z({1, 4}, std::vector<double>{0, 1, 1, 0});
  nn::Graph g;
  const nn::Var l = loss_multihead(g.leaf(yh), g.leaf(zh), y, z, 5.0, 0.1);
  double expect = 0.0;
  for (std::size_t i = 0; i < 4; ++i) expect += 5.0 * bce(yh[i], y[i]) + 0.1 * bce(zh[i], z[i]);
  EXPECT_NEAR(l.value()[0], expect, 1e-12);
}

TEST(Loss, RejectsBadWeightsAndShapes) {
  nn::Graph g;
  const nn::Var p = g.leaf(Tensor({1, 3}, 0.5));
  const Tensor t({1, 3});
  EXPECT_THROW(loss_multihead(p, p, t, t, 0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(loss_multihead(p, p, t, t, 1.0, -1.0), std::invalid_argument);
  EXPECT_THROW(loss_multihead(p, p, Tensor({1, 4}), t, 1.0, 1.0), nn::ShapeError);
  EXPECT_THROW(distill_loss(p, p, Tensor({1, 3}, 1.5), t, 1.0, 1.0), std::invalid_argument);
}

TEST(Loss, DistillationWithHardTeacherEqualsHardLoss) {
  std::mt19937_64 rng(3);
  const Tensor yh = Tensor::uniform({2, 7}, rng, 0.01, 0.99);
  const Tensor zh = Tensor::uniform({2, 7}, rng, 0.01, 0.99);
  Tensor y({2, 7}), z({2, 7});
  for (std::size_t i = 0; i < 14; ++i) {
    y[i] = (i % 5 == 0) ? 1.0 : 0.0;
    z[i] = (i % 3 == 0) ? 1.0 : 0.0;
  }
  nn::Graph g;
  const nn::Var a = g.leaf(yh, true), b = g.leaf(zh, true);
  const double hard = loss_multihead(a, b, y, z, 5.0, 0.1).value()[0];
  const double soft = distill_loss(a, b, y, z, 5.0, 0.1).value()[0];
  EXPECT_EQ(hard, soft);
}

TEST(Loss, BothHeadsPassGradientCheck) {
  Tensor y({2, 5}), z({2, 5});
  y[2] = 1.0;
  z[1] = z[2] = z[3] = 1.0;
  std::mt19937_64 rng(4);
  const Tensor teacher_y = Tensor::uniform({2, 5}, rng, 0.0, 1.0);
  const Tensor teacher_z = Tensor::uniform({2, 5}, rng, 0.0, 1.0);
  const auto r = nn::grad_check({randn({2, 5}, 5), randn({2, 5}, 6)}, [&](nn::Graph&, const std::vector<nn::Var>& p) {
    const nn::Var yh = nn::sigmoid(p[0]);
    const nn::Var zh = nn::sigmoid(p[1]);
    return nn::add(loss_multihead(yh, zh, y, z, 5.0, 0.1), distill_loss(yh, zh, teacher_y, teacher_z, 5.0, 0.1));
  });
  EXPECT_LT(r.max_rel_error, 1e-6);
}

// -- Path sampling ---------------------------------------------------------------

TEST(PathSampling, EveryGeneIsUniform) {
  // Chi-square goodness of fit per gene; critical values at p = 0.001.
  std::mt19937_64 rng(11);
  const std::size_t draws = 16000;
  std::array<std::vector<std::size_t>, arch::kGenes> counts;
  for (std::size_t g = 0; g < arch::kSearchBlocks; ++g) counts[g].assign(arch::kOptionsPerBlock, 0);
  counts[arch::kSearchBlocks].assign(arch::kAttentionOptions, 0);
  for (std::size_t i = 0; i < draws; ++i) {
    const auto genes = train::sample_uniform_path(rng).genes();
    for (std::size_t g = 0; g < arch::kGenes; ++g) ++counts[g][genes[g]];
  }
  for (std::size_t g = 0; g < arch::kGenes; ++g) {
    const double k = static_cast<double>(counts[g].size());
    const double expect = static_cast<double>(draws) / k;
    double chi2 = 0.0;
    for (std::size_t c : counts[g]) chi2 += std::pow(static_cast<double>(c) - expect, 2) / expect;
    const double critical = counts[g].size() == 16 ? 37.697 : 18.467;
    EXPECT_LT(chi2, critical) << "gene " << g;
  }
}

/// Shots whose frames are constant with value (i + 1) / 10.
train::ShotPool flat_pool(std::size_t shots, std::size_t length) {
  train::ShotPool pool;
  for (std::size_t i = 0; i < shots; ++i) {
    pool.push_back({Tensor({length, 2, 2, 3}, static_cast<double>(i + 1) / 10.0)});
  }
  return pool;
}

TEST(Sampling, HardCutLabels) {
  const auto pool = flat_pool(5, 40);
  train::SampleConfig cfg;
  cfg.frames = 30;
  cfg.gradual_probability = 0.0;
  std::mt19937_64 rng(1);
  for (int i = 0; i < 50; ++i) {
    const auto s = train::make_training_sample(pool, rng, cfg);
    ASSERT_EQ(s.frames.shape(), (nn::Shape{1, 30, 2, 2, 3}));
    const auto k = static_cast<std::size_t>(s.transition.lo);
    EXPECT_EQ(s.transition.lo, s.transition.hi);
    ASSERT_LT(k, 29u);
    double ysum = 0.0, zsum = 0.0;
    for (std::size_t t = 0; t < 30; ++t) {
      ysum += s.y[t];
      zsum += s.z[t];
    }
    EXPECT_EQ(ysum, 1.0);
    EXPECT_EQ(zsum, 1.0);
    EXPECT_EQ(s.y[k], 1.0);
    // The labelled frame is the last of the outgoing shot.
    EXPECT_NE(s.frames[k * 12], s.frames[(k + 1) * 12]);
    EXPECT_EQ(s.frames[0], s.frames[k * 12]);
    EXPECT_EQ(s.frames[(k + 1) * 12], s.frames[29 * 12]);
  }
}

TEST(Sampling, GradualLabelsAndBlend) {
  const auto pool = flat_pool(5, 60);
  train::SampleConfig cfg;
  cfg.frames = 40;
  cfg.gradual_probability = 1.0;
  cfg.fade_min = 4;
  cfg.fade_max = 8;
  std::mt19937_64 rng(2);
  for (int i = 0; i < 50; ++i) {
    const auto s = train::make_training_sample(pool, rng, cfg);
    const auto lo = static_cast<std::size_t>(s.transition.lo), hi = static_cast<std::size_t>(s.transition.hi);
    ASSERT_LE(lo, hi);
    const std::size_t span = hi - lo + 1;
    EXPECT_GE(span, 5u);  // fade frames plus the last frame of the outgoing shot
    EXPECT_LE(span, 9u);
    for (std::size_t t = 0; t < 40; ++t) EXPECT_EQ(s.z[t], (t >= lo && t <= hi) ? 1.0 : 0.0);
    std::size_t mid = 0;
    for (std::size_t t = 0; t < 40; ++t)
      if (s.y[t] == 1.0) mid = t;
    EXPECT_EQ(mid, (lo + hi) / 2);
    // Pixel values move monotonically from the outgoing to the incoming shot.
    const double a = s.frames[lo * 12], b = s.frames[(hi + 1) * 12];
    for (std::size_t t = lo; t <= hi; ++t) {
      const double v = s.frames[t * 12];
      EXPECT_LE(std::min(a, b) - 1e-12, v);
      EXPECT_GE(std::max(a, b) + 1e-12, v);
    }
  }
}

TEST(Sampling, NeedsTwoShots) {
  std::mt19937_64 rng(3);
  EXPECT_THROW(train::make_training_sample(flat_pool(1, 100), rng), std::invalid_argument);
}

TEST(Sampling, BatchIsDeterministicPerSeed) {
  const auto pool = flat_pool(6, 50);
  train::SampleConfig cfg;
  cfg.frames = 20;
  std::mt19937_64 a(9), b(9);
  const auto x = train::make_batch(pool, a, cfg, 3);
  const auto y = train::make_batch(pool, b, cfg, 3);
  EXPECT_EQ(x.frames.storage(), y.frames.storage());
  EXPECT_EQ(x.y.shape(), (nn::Shape{3, 20}));
}

// -- Optimizer ---------------------------------------------------------------------

TEST(Sgd, MomentumUpdateMatchesHandComputation) {
  Tensor w({2}, std::vector<double>{1.0, -2.0});
  Tensor untouched({1}, 5.0);
  train::Sgd opt(0.1, 0.9);
  for (int step = 0; step < 2; ++step) {
    nn::Graph g;
    ForwardContext ctx(g, nn::Phase::kTrain, nullptr, true);
    const nn::Var v = ctx.bind(w);
    g.backward(nn::sum(nn::scale(v, 3.0)));  // gradient 3 everywhere
    opt.step(ctx.bindings);
  }
  // v1 = 3, w1 = w0 - 0.3; v2 = 0.9 * 3 + 3 = 5.7, w2 = w1 - 0.57.
  EXPECT_NEAR(w[0], 1.0 - 0.3 - 0.57, 1e-15);
  EXPECT_NEAR(w[1], -2.0 - 0.3 - 0.57, 1e-15);
  EXPECT_EQ(untouched[0], 5.0);
}

TEST(Sgd, ClipsGlobalNorm) {
  Tensor w({2}, 0.0);
  train::Sgd opt(1.0, 0.0, 1.0);
  nn::Graph g;
  ForwardContext ctx(g, nn::Phase::kTrain, nullptr, true);
  const nn::Var v = ctx.bind(w);
  g.backward(nn::sum(nn::linear(nn::reshape(v, {1, 2}), g.constant(Tensor({2, 1}, std::vector<double>{3, 4})),
                                g.constant(Tensor({1})))));
  const double norm = opt.step(ctx.bindings);
  EXPECT_DOUBLE_EQ(norm, 5.0);
  EXPECT_NEAR(w[0], -0.6, 1e-15);
  EXPECT_NEAR(w[1], -0.8, 1e-15);
}

TEST(Sgd, RejectsBadSettings) {
  EXPECT_THROW(train::Sgd(0.0, 0.9), std::invalid_argument);
  EXPECT_THROW(train::Sgd(0.1, 1.0), std::invalid_argument);
  EXPECT_THROW(train::Sgd(0.1, 0.5, -1.0), std::invalid_argument);
}

// -- Training ----------------------------------------------------------------------

NetworkConfig tiny_net() {
  NetworkConfig c;
  c.height = 4;
  c.width = 4;
  c.frames = 12;
  c.filters = {1, 1, 1, 1, 1, 1};
  c.pool_after = {false, false, false, true, false, false};
  c.similarity_projection = 4;
  c.similarity_features = 4;
  c.histogram_features = 4;
  c.hidden = 8;
  return c;
}

train::ShotPool coloured_pool(std::size_t shots, std::size_t length, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  train::ShotPool pool;
  for (std::size_t i = 0; i < shots; ++i) {
    Tensor f({length, 4, 4, 3});
    const double r = u(rng), g = u(rng), b = u(rng);
    for (std::size_t p = 0; p < f.size() / 3; ++p) {
      f[3 * p] = r;
      f[3 * p + 1] = g;
      f[3 * p + 2] = b;
    }
    pool.push_back({f});
  }
  return pool;
}

train::TrainConfig tiny_train() {
  train::TrainConfig t;
  t.lr = 0.05;
  t.batch = 4;
  t.epochs = 3;
  t.steps_per_epoch = 15;
  t.sample.frames = 12;
  t.sample.fade_min = 2;
  t.sample.fade_max = 4;
  t.probe_batch = 6;
  return t;
}

TEST(Trainer, SupernetProbeLossDecreases) {
  SuperNet net = build_supernet(tiny_net(), 1);
  const auto pool = coloured_pool(12, 20, 2);
  std::size_t logged = 0;
  const auto stats = train::train_supernet(net, pool, tiny_train(), [&](const train::StepRecord& r) {
    ++logged;
    EXPECT_FALSE(r.path.empty());
  });
  EXPECT_EQ(logged, 45u);
  EXPECT_EQ(stats.epoch_loss.size(), 3u);
  EXPECT_LT(stats.probe_final, stats.probe_initial);
}

TEST(Trainer, CandidateProbeLossDecreasesAndIsReproducible) {
  const auto pool = coloured_pool(12, 20, 3);
  train::TrainStats a, b;
  Model m1 = train::retrain_candidate(arch::autoshot_f1(), tiny_net(), pool, tiny_train(), &a);
  Model m2 = train::retrain_candidate(arch::autoshot_f1(), tiny_net(), pool, tiny_train(), &b);
  EXPECT_LT(a.probe_final, a.probe_initial);
  EXPECT_EQ(a.epoch_loss, b.epoch_loss);
  auto p1 = m1.parameters(), p2 = m2.parameters();
  for (std::size_t i = 0; i < p1.size(); ++i) EXPECT_EQ(p1[i].tensor->storage(), p2[i].tensor->storage());
}

TEST(Trainer, DivergenceIsReported) {
  // The clamped loss stays finite even for absurd step sizes, so poison a
  // weight instead; the non-finite loss must surface as TrainingDiverged.
  const auto pool = coloured_pool(8, 20, 4);
  Model m = build_network(arch::autoshot_f1(), tiny_net(), 1);
  m.parameters().front().tensor->storage().front() = std::numeric_limits<double>::quiet_NaN();
  train::ModelTrainer trainer(m, pool, tiny_train());
  EXPECT_THROW(trainer.run_epoch(), train::TrainingDiverged);
}

// -- Grafting ----------------------------------------------------------------------

TEST(Graft, CoefficientIsHalfForEqualEntropy) {
  for (double h : {0.0, 0.7, 2.302585092994046}) EXPECT_EQ(train::graft_coefficient(h, h), 0.5);
  EXPECT_GT(train::graft_coefficient(0.5, 1.0), 0.5);  // receiver more informative keeps more
  EXPECT_LT(train::graft_coefficient(1.0, 0.5), 0.5);
  EXPECT_EQ(train::graft_coefficient(0.0, 100.0, 5.0, 10.0), 1.0);
  EXPECT_EQ(train::graft_coefficient(100.0, 0.0, 5.0, 10.0), 0.0);
  EXPECT_NEAR(train::graft_coefficient(1.0, 2.0, 0.4, 1.0), 0.4 * std::atan(1.0) + 0.5, 1e-15);
}

TEST(Graft, EntropyOfHistogram) {
  const std::vector<double> same(7, 3.0);
  EXPECT_EQ(train::layer_entropy(same), 0.0);
  std::vector<double> spread;
  for (int i = 0; i < 100; ++i) spread.push_back(i);
  EXPECT_NEAR(train::layer_entropy(spread, 10), std::log(10.0), 1e-12);
  const std::vector<double> two{0.0, 0.0, 0.0, 1.0};
  EXPECT_NEAR(train::layer_entropy(two, 10), -(0.75 * std::log(0.75) + 0.25 * std::log(0.25)), 1e-15);
  EXPECT_THROW(train::layer_entropy(std::vector<double>{}), std::invalid_argument);
}

/// Entropy recomputed from scratch with the same binning rule.
double entropy_oracle(const Tensor& t, std::size_t bins) {
  double lo = t[0], hi = t[0];
  for (double v : t.data()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi == lo) return 0.0;
  std::map<std::size_t, double> counts;
  for (double v : t.data()) counts[std::min(bins - 1, static_cast<std::size_t>((v - lo) / ((hi - lo) / bins)))] += 1.0;
  double h = 0.0;
  for (const auto& [b, c] : counts) h -= c / t.size() * std::log(c / t.size());
  return h;
}

TEST(Graft, ResultIsTheConvexCombinationPerLayer) {
  const NetworkConfig cfg = tiny_net();
  const auto code = arch::autoshot_precision();
  std::vector<Model> models;
  for (std::uint64_t s = 0; s < 3; ++s) models.push_back(build_network(code, cfg, 10 + s));
  std::vector<std::vector<Tensor>> before(3), stats_before(3);
  for (std::size_t i = 0; i < 3; ++i) {
    for (const auto& p : models[i].parameters()) before[i].push_back(*p.tensor);
    for (const auto& b : models[i].buffers()) stats_before[i].push_back(*b.tensor);
  }
  std::vector<Model*> ptrs{&models[0], &models[1], &models[2]};
  train::GraftConfig gc;
  const auto records = train::graft_networks(ptrs, gc);
  const auto names = models[0].parameters();
  ASSERT_EQ(records.size(), 3 * names.size());
  std::size_t r = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const std::size_t donor = (i + 2) % 3;
    const auto after = models[i].parameters();
    for (std::size_t l = 0; l < after.size(); ++l, ++r) {
      const double alpha = train::graft_coefficient(entropy_oracle(before[donor][l], 10), entropy_oracle(before[i][l], 10));
      EXPECT_EQ(records[r].layer, names[l].name);
      EXPECT_EQ(records[r].donor, donor);
      EXPECT_NEAR(records[r].alpha, alpha, 1e-15);
      for (std::size_t k = 0; k < after[l].tensor->size(); ++k) {
        EXPECT_NEAR((*after[l].tensor)[k], alpha * before[i][l][k] + (1.0 - alpha) * before[donor][l][k], 1e-15);
      }
    }
  }
}

TEST(Graft, AlphaOverrideOfOneKeepsReceiver) {
  std::vector<Model> models;
  for (std::uint64_t s = 0; s < 2; ++s) models.push_back(build_network(arch::autoshot_f1(), tiny_net(), s));
  std::vector<Tensor> before;
  for (const auto& p : models[0].parameters()) before.push_back(*p.tensor);
  train::graft_networks({&models[0], &models[1]}, {}, 1.0);
  const auto after = models[0].parameters();
  for (std::size_t l = 0; l < after.size(); ++l) EXPECT_EQ(after[l].tensor->storage(), before[l].storage());
}

TEST(Graft, RejectsMismatchedModels) {
  Model a = build_network(arch::autoshot_f1(), tiny_net(), 1);
  Model b = build_network(arch::autoshot_precision(), tiny_net(), 1);
  EXPECT_THROW(train::graft_networks({&a, &b}, {}), std::invalid_argument);
  EXPECT_THROW(train::graft_networks({&a}, {}), std::invalid_argument);
}

TEST(Graft, EnsembleTrainsEveryNetwork) {
  auto t = tiny_train();
  t.epochs = 2;
  t.steps_per_epoch = 4;
  train::GraftConfig gc;
  gc.networks = 2;
  const auto res = train::train_graft_ensemble(arch::autoshot_f1(), tiny_net(), coloured_pool(8, 20, 5), t, gc);
  ASSERT_EQ(res.models.size(), 2u);
  ASSERT_EQ(res.epoch_loss.size(), 2u);
  EXPECT_EQ(res.epoch_loss[0].size(), 2u);
  EXPECT_FALSE(res.last_round.empty());
}

// -- Checkpoints -------------------------------------------------------------------

TEST(Checkpoint, ModelRoundTripIsBitExact) {
  Model m = build_network(arch::parse_arch("C(5),B(4),V2A(12F,4),V2(4F,5),C(4),B(5);attn=2"), tiny_net(), 7);
  for (auto& b : m.buffers()) (*b.tensor)[0] = 0.125;
  std::stringstream buf;
  save_model(buf, m);
  Model r = load_model(buf);
  EXPECT_EQ(r.arch, m.arch);
  EXPECT_EQ(r.config, m.config);
  auto a = m.parameters(), b = r.parameters();
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].tensor->storage(), b[i].tensor->storage());
  auto ab = m.buffers(), bb = r.buffers();
  for (std::size_t i = 0; i < ab.size(); ++i) EXPECT_EQ(ab[i].tensor->storage(), bb[i].tensor->storage());
}

TEST(Checkpoint, SupernetRoundTrip) {
  SuperNet n = build_supernet(tiny_net(), 3);
  std::stringstream buf;
  save_supernet(buf, n);
  SuperNet r = load_supernet(buf);
  auto a = n.parameters(), b = r.parameters();
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); i += 17) EXPECT_EQ(a[i].tensor->storage(), b[i].tensor->storage());
}

TEST(Checkpoint, CorruptInputIsRejected) {
  Model m = build_network(arch::autoshot_f1(), tiny_net(), 7);
  std::stringstream buf;
  save_model(buf, m);
  std::string bytes = buf.str();
  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  std::stringstream s1(bad_magic);
  EXPECT_THROW(load_model(s1), std::runtime_error);
  std::stringstream s2(bytes.substr(0, bytes.size() / 2));
  EXPECT_THROW(load_model(s2), std::runtime_error);
  std::stringstream s3(bytes);
  EXPECT_THROW(load_supernet(s3), std::runtime_error);
}

}  // namespace
}  // namespace autoshot
