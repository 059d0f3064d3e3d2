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

#ifndef S2GA_PCA_HPP
#define S2GA_PCA_HPP

#include <cstddef>

#include "s2ga/dataset.hpp"
#include "s2ga/tensor.hpp"

namespace s2ga {

struct PcaResult {
  Matrix reduced;    // target_dim x C projections of the centred columns
  Matrix basis;      // q x target_dim, orthonormal columns
  Vector mean;       // q
  Vector variances;  // per component, sample covariance normalisation 1/(C-1)
};

/// Principal components of the columns of `vectors` (q x C) by power
/// iteration with deflation on the sample covariance. Each component is
/// signed so that its largest-magnitude entry is positive.
PcaResult pca_reduce(const Matrix& vectors, std::size_t target_dim);

/// mean + basis * reduced, back in the original q-dimensional space.
Matrix pca_reconstruct(const PcaResult& pca);

/// Replaces every class semantic vector by its PCA projection.
ZslDataset reduce_semantics(const ZslDataset& ds, std::size_t target_dim);

}  // namespace s2ga

#endif  // S2GA_PCA_HPP
