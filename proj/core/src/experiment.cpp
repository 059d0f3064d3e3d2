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

#include "s2ga/experiment.hpp"

#include <stdexcept>
#include <string>

#include "s2ga/sga.hpp"

namespace s2ga {

Preset parse_preset(std::string_view name) {
  if (name == "standard") return Preset::standard;
  if (name == "desk") return Preset::desk;
  throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
}

ExperimentConfig preset_config(Preset preset, std::size_t k_layers, std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.k_layers = k_layers;
  cfg.train.seed = seed;
  if (preset == Preset::desk) {
    cfg.d = 16;
    cfg.train.learning_rate = 1e-3;
    cfg.train.batch_size = 64;
    cfg.train.max_iterations = 3000;
    cfg.train.patience = 500;
  }
  return cfg;
}

SgaConfig sga_config_for(const ZslDataset& ds, std::size_t d, std::size_t k_layers) {
  SgaConfig cfg{ds.p, ds.m, ds.q, d, k_layers};
  cfg.validate();
  return cfg;
}

std::vector<LabeledImage> labeled_images(const ZslDataset& ds, std::span<const int> class_ids) {
  std::vector<LabeledImage> out;
  for (const ImageRecord* im : ds.images_of(class_ids)) out.push_back({&im->regions, im->class_id});
  return out;
}

ZeroShotRun run_zero_shot(const ZslDataset& ds, const ExperimentConfig& cfg, std::ostream* log) {
  if (ds.unseen.empty()) throw std::invalid_argument("run_zero_shot: dataset has no unseen classes");
  const TrainingSet data = make_training_set(ds, cfg.holdout_fraction, cfg.train.seed);
  ZeroShotRun run{train(data, sga_config_for(ds, cfg.d, cfg.k_layers), cfg.train, log), {}};
  const std::vector<LabeledImage> test = labeled_images(ds, ds.unseen);
  run.unseen = evaluate_accuracy(run.trained.model, test, ds.table(ds.unseen), cfg.distance);
  return run;
}

double signal_attention_mass(const S2gaModel& model, const ZslDataset& ds, const SynthTruth& truth) {
  const std::size_t k = model.config.k_layers;
  if (k == 0 || ds.images.empty()) return 0.0;
  double mass = 0.0;
  for (const ImageRecord& im : ds.images) {
    const SgaForward f = sga_forward(im.regions, model.config, model.layers);
    for (const LayerTrace& layer : f.trace.layers) {
      for (std::size_t r : truth.signal_regions.at(im.class_id)) mass += layer.probs[r];
    }
  }
  return mass / static_cast<double>(ds.images.size() * k);
}

}  // namespace s2ga
