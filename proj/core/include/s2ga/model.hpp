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

#ifndef S2GA_MODEL_HPP
#define S2GA_MODEL_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "s2ga/matcher.hpp"
#include "s2ga/sga.hpp"

namespace s2ga {

/// Attention stack plus matching head. Parameter blocks are enumerated in a
/// fixed canonical order (layer by layer, then the matcher), which the model
/// file, the optimizer state and the gradient checker all share.
struct S2gaModel {
  SgaConfig config;
  std::vector<SgaLayerParams> layers;
  MatcherParams matcher;

  /// Glorot-uniform weights and zero biases, drawn from `seed`.
  static S2gaModel initialize(const SgaConfig& cfg, std::uint64_t seed);
  static S2gaModel zeros(const SgaConfig& cfg);

  void validate() const;

  template <typename T>
  struct BlockView {
    std::string name;
    std::size_t rows;
    std::size_t cols;
    std::span<T> values;
  };
  using Block = BlockView<double>;
  using ConstBlock = BlockView<const double>;

  std::vector<Block> blocks();
  std::vector<ConstBlock> blocks() const;

  std::size_t parameter_count() const;
  Vector flatten() const;
  void assign(std::span<const double> flat);
};

struct LabeledRegions {
  const RegionFeatures* regions = nullptr;
  std::size_t class_index = 0;  // column in the seen-class table
};

/// Mean over the batch of classify + w.align * align + w.guide * sum_k guide_k.
LossBreakdown total_loss(const S2gaModel& model, std::span<const LabeledRegions> batch,
                         const ClassSemanticTable& seen, LossWeights weights);

struct LossAndGradient {
  LossBreakdown loss;
  S2gaModel gradient;  // same layout as the model
};

/// Analytic gradient of total_loss. Per-example contributions are summed in
/// batch order.
LossAndGradient loss_and_gradient(const S2gaModel& model, std::span<const LabeledRegions> batch,
                                  const ClassSemanticTable& seen, LossWeights weights);

/// Image representation u_g after the attention stack.
Vector encode(const S2gaModel& model, const RegionFeatures& regions);

}  // namespace s2ga

#endif  // S2GA_MODEL_HPP
