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

// Joint training of the attention stack and the matching head.
//
// One iteration is one RMSProp step on a minibatch. After every step the
// model is scored on the held-out seen-class images; a check counts as an
// improvement when validation accuracy rises, or stays equal while the
// validation loss drops. Training stops after `patience` consecutive
// non-improving checks or `max_iterations` steps and returns the parameters
// of the best check.

#ifndef S2GA_TRAINER_HPP
#define S2GA_TRAINER_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "s2ga/dataset.hpp"
#include "s2ga/model.hpp"

namespace s2ga {

struct TrainConfig {
  double learning_rate = 1e-4;
  std::size_t batch_size = 512;  // capped at the training set size
  std::size_t max_iterations = 3000;
  std::size_t patience = 30;
  double rmsprop_decay = 0.9;
  double rmsprop_epsilon = 1e-8;
  std::uint64_t seed = 0;
  LossWeights weights;

  void validate() const;
};

struct RmsPropConfig {
  double learning_rate = 1e-4;
  double decay = 0.9;
  double epsilon = 1e-8;
};

class NonFiniteGradientError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// state <- decay*state + (1-decay)*grad^2;
/// param <- param - lr*grad / (sqrt(state) + eps).
void rmsprop_step(std::span<double> param, std::span<const double> grad, std::span<double> state,
                  const RmsPropConfig& cfg, std::string_view block = "parameters");

struct IterationRecord {
  std::size_t iteration = 0;  // 1-based
  LossBreakdown loss;         // on the minibatch, before the update
  double validation_accuracy = 0.0;
  double validation_loss = 0.0;
};

enum class StopReason { max_iterations, early_stop };
std::string_view to_string(StopReason reason);

struct TrainReport {
  std::vector<IterationRecord> history;
  double best_validation_accuracy = 0.0;
  double best_validation_loss = 0.0;
  std::size_t best_iteration = 0;
  StopReason stop_reason = StopReason::max_iterations;
  double wall_seconds = 0.0;
};

/// Seen-class training data. Holds pointers into the dataset it was built
/// from, which must outlive it.
struct TrainingSet {
  ClassSemanticTable seen;
  std::vector<LabeledRegions> train;
  std::vector<LabeledRegions> validation;
};

/// Splits the seen-class images into train and a seeded validation holdout
/// of round(holdout_fraction * n) images (at least one).
TrainingSet make_training_set(const ZslDataset& ds, double holdout_fraction = 0.1,
                              std::uint64_t seed = 0);

struct TrainResult {
  S2gaModel model;
  TrainReport report;
};

/// `log`, when given, receives one line per iteration.
TrainResult train(const TrainingSet& data, const SgaConfig& sga, const TrainConfig& cfg,
                  std::ostream* log = nullptr);

/// Fraction of examples whose argmax seen-class probability is the true class.
double seen_accuracy(const S2gaModel& model, std::span<const LabeledRegions> examples,
                     const ClassSemanticTable& seen);

struct GradCheckBlock {
  std::string name;
  std::size_t count = 0;
  double max_rel_error = 0.0;
  bool passed = false;
};

struct GradCheckReport {
  std::vector<GradCheckBlock> blocks;  // worst case over trials, canonical block order
  double max_rel_error = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

/// Relative error used by the checker: |a - n| / max(|a|, |n|, kGradCheckFloor).
inline constexpr double kGradCheckFloor = 1e-3;
double gradient_relative_error(double analytic, double numeric);

/// Compares loss_and_gradient with central differences (eps = 1e-6) on
/// `trials` random models and batches of the given shape.
GradCheckReport grad_check(const SgaConfig& cfg, std::size_t trials, double tolerance,
                           std::uint64_t seed = 0);

}  // namespace s2ga

#endif  // S2GA_TRAINER_HPP
