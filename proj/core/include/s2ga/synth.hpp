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

// Desk-scale synthetic fine-grained zero-shot data.
//
// Class semantics are non-negative, unit-norm vectors drawn around a handful
// of latent group centres, so classes inside a group are close
// ("fine-grained"). Every class has `signal_regions` informative region
// positions; signal slot j of an image is A_j s + noise, where A_j is a fixed
// non-negative map with orthogonal columns and s the class semantics. All
// other regions are pure Gaussian noise. Parent categories come from k-means over the class
// semantics with round(sqrt(num_classes)) clusters.

#ifndef S2GA_SYNTH_HPP
#define S2GA_SYNTH_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

#include "s2ga/dataset.hpp"

namespace s2ga {

struct SynthSpec {
  std::size_t num_classes = 20;
  std::size_t images_per_class = 30;
  std::size_t p = 16;
  std::size_t m = 6;
  std::size_t q = 8;
  std::size_t signal_regions = 2;
  double noise_sigma = 0.3;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Generating structure, kept for oracle checks.
struct SynthTruth {
  std::vector<Matrix> signal_maps;                         // one p x q map per signal slot
  std::map<int, std::vector<std::size_t>> signal_regions;  // class id -> region positions, by slot
};

struct SynthResult {
  ZslDataset dataset;
  SynthTruth truth;
};

/// All classes land in the seen split; use split_scs / split_sce afterwards.
SynthResult synth_generate_with_truth(const SynthSpec& spec);
ZslDataset synth_generate(const SynthSpec& spec);

/// Classifies each image by matching its signal-region columns against
/// A_j s_c for every class (nearest in summed squared distance); returns the
/// fraction classified correctly.
double noiseless_oracle_accuracy(const ZslDataset& ds, const SynthTruth& truth);

/// Deterministic k-means (k-means++ seeding) over the columns of `points`.
std::vector<int> kmeans_assign(const Matrix& points, std::size_t k, std::uint64_t seed);

}  // namespace s2ga

#endif  // S2GA_SYNTH_HPP
