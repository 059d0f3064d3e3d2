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

// Train-then-evaluate helpers shared by the command-line tool and the
// acceptance suite.

#ifndef S2GA_EXPERIMENT_HPP
#define S2GA_EXPERIMENT_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "s2ga/dataset.hpp"
#include "s2ga/eval.hpp"
#include "s2ga/synth.hpp"
#include "s2ga/trainer.hpp"

namespace s2ga {

/// Hyperparameter sets. `standard` holds the library defaults
/// (d = 128, lr 1e-4, batch 512, patience 30); `desk` is tuned for the
/// small synthetic benchmark (d = 16, lr 1e-3, batch 64, patience 500).
enum class Preset { standard, desk };

Preset parse_preset(std::string_view name);

struct ExperimentConfig {
  std::size_t d = 128;
  std::size_t k_layers = 2;
  TrainConfig train;
  double holdout_fraction = 0.1;
  DistanceKind distance = DistanceKind::euclidean;
};

ExperimentConfig preset_config(Preset preset, std::size_t k_layers = 2, std::uint64_t seed = 0);

SgaConfig sga_config_for(const ZslDataset& ds, std::size_t d, std::size_t k_layers);

std::vector<LabeledImage> labeled_images(const ZslDataset& ds, std::span<const int> class_ids);

struct ZeroShotRun {
  TrainResult trained;
  EvalResult unseen;
};

/// Trains on the seen split of `ds` and scores the unseen split.
ZeroShotRun run_zero_shot(const ZslDataset& ds, const ExperimentConfig& cfg,
                          std::ostream* log = nullptr);

/// Mean over images and layers of the attention mass on the planted signal
/// regions of each image's class.
double signal_attention_mass(const S2gaModel& model, const ZslDataset& ds, const SynthTruth& truth);

}  // namespace s2ga

#endif  // S2GA_EXPERIMENT_HPP
