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

#ifndef S2GA_RANDOM_HPP
#define S2GA_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <random>

#include "s2ga/tensor.hpp"

namespace s2ga {

using Rng = std::mt19937_64;

/// Uniform in [-a, a] with a = sqrt(6 / (fan_in + fan_out)); fan_in is cols.
inline void glorot_uniform(Matrix& w, Rng& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
  std::uniform_real_distribution<double> dist(-a, a);
  for (double& v : w.values()) v = dist(rng);
}

inline void fill_normal(std::span<double> out, Rng& rng, double mean = 0.0, double sigma = 1.0) {
  std::normal_distribution<double> dist(mean, sigma);
  for (double& v : out) v = dist(rng);
}

inline void fill_uniform(std::span<double> out, Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  for (double& v : out) v = dist(rng);
}

}  // namespace s2ga

#endif  // S2GA_RANDOM_HPP
