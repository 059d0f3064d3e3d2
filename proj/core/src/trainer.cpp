// Copyright 2026 The S2GA Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "s2ga/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "s2ga/metrics.hpp"
#include "s2ga/random.hpp"

namespace s2ga {

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw std::invalid_argument("TrainConfig: learning_rate must be finite and >= 0");
  }
  if (patience < 1) throw std::invalid_argument("TrainConfig: patience must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
  if (!(rmsprop_decay >= 0.0 && rmsprop_decay < 1.0)) {
    throw std::invalid_argument("TrainConfig: rmsprop_decay must be in [0, 1)");
  }
  if (!(rmsprop_epsilon > 0.0)) throw std::invalid_argument("TrainConfig: rmsprop_epsilon must be > 0");
}

void rmsprop_step(std::span<double> param, std::span<const double> grad, std::span<double> state,
                  const RmsPropConfig& cfg, std::string_view block) {
  if (param.size() != grad.size() || param.size() != state.size()) {
    throw DimensionError("rmsprop_step: size mismatch in block " + std::string(block));
  }
  if (!all_finite(grad)) {
    throw NonFiniteGradientError("rmsprop_step: non-finite gradient in block " + std::string(block));
  }
  for (std::size_t i = 0; i < param.size(); ++i) {
    state[i] = cfg.decay * state[i] + (1.0 - cfg.decay) * grad[i] * grad[i];
    param[i] -= cfg.learning_rate * grad[i] / (std::sqrt(state[i]) + cfg.epsilon);
  }
}

std::string_view to_string(StopReason reason) {
  return reason == StopReason::early_stop ? "early-stop" : "max-iterations";
}

TrainingSet make_training_set(const ZslDataset& ds, double holdout_fraction, std::uint64_t seed) {
  if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0)) {
    throw std::invalid_argument("make_training_set: holdout fraction must be in (0, 1)");
  }
  TrainingSet set;
  set.seen = ds.table(ds.seen);
  std::vector<LabeledRegions> all;
  for (const ImageRecord* im : ds.images_of(ds.seen)) {
    all.push_back({&im->regions, *set.seen.index_of(im->class_id)});
  }
  if (all.size() < 2) {
    throw std::invalid_argument("make_training_set: need at least two seen-class images");
  }
  Rng rng(seed);
  std::shuffle(all.begin(), all.end(), rng);
  auto holdout = static_cast<std::size_t>(std::lround(holdout_fraction * static_cast<double>(all.size())));
  holdout = std::clamp<std::size_t>(holdout, 1, all.size() - 1);
  set.validation.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(holdout));
  set.train.assign(all.begin() + static_cast<std::ptrdiff_t>(holdout), all.end());
  return set;
}

double seen_accuracy(const S2gaModel& model, std::span<const LabeledRegions> examples,
                     const ClassSemanticTable& seen) {
  if (examples.empty()) return 0.0;
  const Matrix embedded = embed_all(seen, model.matcher);
  std::size_t correct = 0;
  for (const LabeledRegions& ex : examples) {
    const Vector probs = class_probs(encode(model, *ex.regions), embedded);
    const auto best = static_cast<std::size_t>(
        std::max_element(probs.values().begin(), probs.values().end()) - probs.values().begin());
    if (best == ex.class_index) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(examples.size());
}

TrainResult train(const TrainingSet& data, const SgaConfig& sga, const TrainConfig& cfg,
                  std::ostream* log) {
  cfg.validate();
  sga.validate();
  if (data.train.empty()) throw std::invalid_argument("train: empty training split");
  if (data.validation.empty()) throw std::invalid_argument("train: empty validation split");

  const auto start = std::chrono::steady_clock::now();
  TrainResult result{S2gaModel::initialize(sga, cfg.seed), {}};
  S2gaModel& model = result.model;
  TrainReport& report = result.report;

  std::vector<std::vector<double>> state;
  for (const auto& b : model.blocks()) state.emplace_back(b.values.size(), 0.0);
  const RmsPropConfig opt{cfg.learning_rate, cfg.rmsprop_decay, cfg.rmsprop_epsilon};

  Rng rng(cfg.seed ^ 0xda942042e4dd58b5ULL);
  std::vector<std::size_t> order(data.train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  std::size_t cursor = 0;
  const std::size_t batch_size = std::min(cfg.batch_size, data.train.size());
  std::vector<LabeledRegions> batch(batch_size);

  S2gaModel best = model;
  double best_acc = -1.0;
  double best_loss = std::numeric_limits<double>::infinity();
  std::size_t stale = 0;
  report.stop_reason = StopReason::max_iterations;

  for (std::size_t it = 1; it <= cfg.max_iterations; ++it) {
    for (std::size_t b = 0; b < batch_size; ++b) {
      if (cursor == order.size()) {
        std::shuffle(order.begin(), order.end(), rng);
        cursor = 0;
      }
      batch[b] = data.train[order[cursor++]];
    }
    const LossAndGradient lg = loss_and_gradient(model, batch, data.seen, cfg.weights);
    auto params = model.blocks();
    const auto grads = lg.gradient.blocks();
    for (std::size_t k = 0; k < params.size(); ++k) {
      rmsprop_step(params[k].values, grads[k].values, state[k], opt, params[k].name);
    }

    IterationRecord rec;
    rec.iteration = it;
    rec.loss = lg.loss;
    rec.validation_accuracy = seen_accuracy(model, data.validation, data.seen);
    rec.validation_loss = total_loss(model, data.validation, data.seen, cfg.weights).total;
    report.history.push_back(rec);
    if (log) {
      *log << "iter=" << it << " classify=" << format_fixed6(rec.loss.classify)
           << " align=" << format_fixed6(rec.loss.align) << " guide=" << format_fixed6(rec.loss.guide)
           << " total=" << format_fixed6(rec.loss.total)
           << " val_acc=" << format_fixed6(rec.validation_accuracy)
           << " val_loss=" << format_fixed6(rec.validation_loss) << '\n';
    }

    const bool improved = rec.validation_accuracy > best_acc ||
                          (rec.validation_accuracy == best_acc && rec.validation_loss < best_loss);
    if (improved) {
      best = model;
      best_acc = rec.validation_accuracy;
      best_loss = rec.validation_loss;
      report.best_iteration = it;
      stale = 0;
    } else if (++stale >= cfg.patience) {
      report.stop_reason = StopReason::early_stop;
      break;
    }
  }

  if (report.best_iteration > 0) {
    model = std::move(best);
    report.best_validation_accuracy = best_acc;
    report.best_validation_loss = best_loss;
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

double gradient_relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), kGradCheckFloor});
  return std::abs(analytic - numeric) / denom;
}

GradCheckReport grad_check(const SgaConfig& cfg, std::size_t trials, double tolerance,
                           std::uint64_t seed) {
  cfg.validate();
  constexpr std::size_t kBatch = 3;
  constexpr std::size_t kClasses = 3;

  GradCheckReport report;
  report.tolerance = tolerance;
  {
    const S2gaModel shape = S2gaModel::zeros(cfg);
    for (const auto& b : shape.blocks()) report.blocks.push_back({b.name, b.values.size(), 0.0, true});
  }

  for (std::size_t trial = 0; trial < trials; ++trial) {
    Rng rng(seed + 7919 * trial);
    S2gaModel model = S2gaModel::initialize(cfg, rng());
    // Non-zero biases so the checked point is generic.
    for (auto& l : model.layers) l.b_p = std::uniform_real_distribution<double>(-0.5, 0.5)(rng);
    fill_uniform(model.matcher.b_e.values(), rng, -0.2, 0.2);

    std::vector<RegionFeatures> regions;
    for (std::size_t b = 0; b < kBatch; ++b) {
      Matrix f(cfg.p, cfg.m);
      fill_normal(f.values(), rng, 0.3, 1.0);
      regions.emplace_back(std::move(f));
    }
    Matrix sem(cfg.q, kClasses);
    fill_uniform(sem.values(), rng, 0.0, 1.0);
    const ClassSemanticTable table(std::move(sem), {0, 1, 2});
    std::vector<LabeledRegions> batch;
    for (std::size_t b = 0; b < kBatch; ++b) batch.push_back({&regions[b], b % kClasses});
    const LossWeights weights{0.7, 0.4};

    const LossAndGradient lg = loss_and_gradient(model, batch, table, weights);
    const Vector analytic = lg.gradient.flatten();
    S2gaModel probe = model;
    const Vector numeric = finite_diff_grad(
        [&](std::span<const double> flat) {
          probe.assign(flat);
          return total_loss(probe, batch, table, weights).total;
        },
        model.flatten(), 1e-6);

    std::size_t offset = 0;
    for (GradCheckBlock& blk : report.blocks) {
      for (std::size_t i = 0; i < blk.count; ++i) {
        const double err = gradient_relative_error(analytic[offset + i], numeric[offset + i]);
        blk.max_rel_error = std::max(blk.max_rel_error, err);
      }
      offset += blk.count;
    }
  }

  report.passed = true;
  for (GradCheckBlock& blk : report.blocks) {
    blk.passed = blk.max_rel_error < tolerance;
    report.max_rel_error = std::max(report.max_rel_error, blk.max_rel_error);
    report.passed = report.passed && blk.passed;
  }
  return report;
}

}  // namespace s2ga
