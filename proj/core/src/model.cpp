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

#include "s2ga/model.hpp"

#include <algorithm>
#include <stdexcept>

namespace s2ga {

namespace {

template <typename Model, typename Block>
std::vector<Block> collect_blocks(Model& model) {
  std::vector<Block> out;
  out.reserve(model.layers.size() * 5 + 2);
  for (std::size_t k = 0; k < model.layers.size(); ++k) {
    auto& l = model.layers[k];
    const std::string prefix = "layer" + std::to_string(k) + ".";
    out.push_back({prefix + "w_ia", l.w_ia.rows(), l.w_ia.cols(), l.w_ia.values()});
    out.push_back({prefix + "w_gs", l.w_gs.rows(), l.w_gs.cols(), l.w_gs.values()});
    out.push_back({prefix + "w_ga", l.w_ga.rows(), l.w_ga.cols(), l.w_ga.values()});
    out.push_back({prefix + "w_p", l.w_p.rows(), l.w_p.cols(), l.w_p.values()});
    out.push_back({prefix + "b_p", 1, 1, {&l.b_p, 1}});
  }
  out.push_back({"matcher.w_e", model.matcher.w_e.rows(), model.matcher.w_e.cols(),
                 model.matcher.w_e.values()});
  out.push_back({"matcher.b_e", model.matcher.b_e.size(), 1, model.matcher.b_e.values()});
  return out;
}

struct BatchForward {
  std::vector<SgaForward> sga;
  MatcherForward matcher;
  std::vector<double> guide;  // per example, summed over layers
};

BatchForward forward_batch(const S2gaModel& model, std::span<const LabeledRegions> batch,
                           const ClassSemanticTable& seen, LossWeights weights) {
  if (batch.empty()) throw std::invalid_argument("total_loss: empty batch");
  if (seen.dim() != model.config.q) {
    throw DimensionError("total_loss: semantic table has q=" + std::to_string(seen.dim()) +
                         ", model expects q=" + std::to_string(model.config.q));
  }
  BatchForward f;
  f.sga.reserve(batch.size());
  f.guide.reserve(batch.size());
  std::vector<Vector> reps;
  std::vector<std::size_t> targets;
  reps.reserve(batch.size());
  targets.reserve(batch.size());
  for (const LabeledRegions& ex : batch) {
    if (ex.regions == nullptr) throw std::invalid_argument("total_loss: null regions");
    if (ex.class_index >= seen.size()) {
      throw std::out_of_range("total_loss: class index " + std::to_string(ex.class_index) +
                              " outside the seen table");
    }
    f.sga.push_back(sga_forward(*ex.regions, model.config, model.layers));
    const Vector s = seen.semantic(ex.class_index);
    double g = 0.0;
    for (const LayerTrace& t : f.sga.back().trace.layers) g += guide_loss(t.guide_mid, s);
    f.guide.push_back(g);
    reps.push_back(f.sga.back().u_g);
    targets.push_back(ex.class_index);
  }
  f.matcher = matcher_forward(seen, model.matcher, reps, targets, weights);
  return f;
}

LossBreakdown breakdown(const BatchForward& f, LossWeights weights) {
  LossBreakdown loss;
  loss.weights = weights;
  loss.classify = f.matcher.classify_mean;
  loss.align = f.matcher.align_mean;
  double guide = 0.0;
  for (double g : f.guide) guide += g;
  loss.guide = guide / static_cast<double>(f.guide.size());
  loss.total = loss.classify + weights.align * loss.align + weights.guide * loss.guide;
  return loss;
}

}  // namespace

S2gaModel S2gaModel::initialize(const SgaConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng rng(seed);
  S2gaModel model;
  model.config = cfg;
  model.layers.reserve(cfg.k_layers);
  for (std::size_t k = 0; k < cfg.k_layers; ++k) model.layers.push_back(SgaLayerParams::glorot(cfg, rng));
  model.matcher = MatcherParams::glorot(cfg.p, cfg.q, rng);
  return model;
}

S2gaModel S2gaModel::zeros(const SgaConfig& cfg) {
  S2gaModel model;
  model.config = cfg;
  model.layers.assign(cfg.k_layers, SgaLayerParams::zeros(cfg));
  model.matcher = MatcherParams::zeros(cfg.p, cfg.q);
  return model;
}

void S2gaModel::validate() const {
  config.validate();
  if (layers.size() != config.k_layers) {
    throw std::invalid_argument("S2gaModel: layer count does not match k_layers");
  }
  for (const SgaLayerParams& l : layers) l.check_shapes(config);
  matcher.check_shapes(config.p, config.q);
}

std::vector<S2gaModel::Block> S2gaModel::blocks() {
  return collect_blocks<S2gaModel, Block>(*this);
}

std::vector<S2gaModel::ConstBlock> S2gaModel::blocks() const {
  return collect_blocks<const S2gaModel, ConstBlock>(*this);
}

std::size_t S2gaModel::parameter_count() const {
  std::size_t n = 0;
  for (const ConstBlock& b : blocks()) n += b.values.size();
  return n;
}

Vector S2gaModel::flatten() const {
  std::vector<double> flat;
  flat.reserve(parameter_count());
  for (const ConstBlock& b : blocks()) flat.insert(flat.end(), b.values.begin(), b.values.end());
  return Vector(std::move(flat));
}

void S2gaModel::assign(std::span<const double> flat) {
  if (flat.size() != parameter_count()) {
    throw DimensionError("S2gaModel::assign: got " + std::to_string(flat.size()) +
                         " values for " + std::to_string(parameter_count()) + " parameters");
  }
  std::size_t offset = 0;
  for (Block& b : blocks()) {
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(offset), b.values.size(), b.values.begin());
    offset += b.values.size();
  }
}

LossBreakdown total_loss(const S2gaModel& model, std::span<const LabeledRegions> batch,
                         const ClassSemanticTable& seen, LossWeights weights) {
  return breakdown(forward_batch(model, batch, seen, weights), weights);
}

LossAndGradient loss_and_gradient(const S2gaModel& model, std::span<const LabeledRegions> batch,
                                  const ClassSemanticTable& seen, LossWeights weights) {
  const BatchForward f = forward_batch(model, batch, seen, weights);
  LossAndGradient out{breakdown(f, weights), S2gaModel::zeros(model.config)};

  MatcherGradients mg = matcher_backward(f.matcher, seen);
  out.gradient.matcher = std::move(mg.params);

  const std::vector<double> guide_weights(model.layers.size(),
                                          weights.guide / static_cast<double>(batch.size()));
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const SgaGradients sg = sga_backward(f.sga[b], model.layers, mg.d_ug[b],
                                         seen.semantic(batch[b].class_index), guide_weights);
    for (std::size_t k = 0; k < model.layers.size(); ++k) {
      SgaLayerParams& acc = out.gradient.layers[k];
      const SgaLayerParams& g = sg.layers[k];
      axpy(1.0, g.w_ia, acc.w_ia);
      axpy(1.0, g.w_gs, acc.w_gs);
      axpy(1.0, g.w_ga, acc.w_ga);
      axpy(1.0, g.w_p, acc.w_p);
      acc.b_p += g.b_p;
    }
  }
  return out;
}

Vector encode(const S2gaModel& model, const RegionFeatures& regions) {
  return sga_forward(regions, model.config, model.layers).u_g;
}

}  // namespace s2ga
