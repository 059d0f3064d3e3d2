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

// Seen/unseen class partitions driven by parent categories.
//
// Super-category-shared (SCS): every unseen class has at least one seen
// sibling under the same parent. Super-category-exclusive (SCE): no unseen
// class shares a parent with any seen class.

#ifndef S2GA_SPLITS_HPP
#define S2GA_SPLITS_HPP

#include <cstdint>
#include <stdexcept>

#include "s2ga/dataset.hpp"

namespace s2ga {

struct SplitOptions {
  double unseen_fraction = 0.25;
  std::uint64_t seed = 0;
};

class SplitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unseen count is round(unseen_fraction * #classes), at least 1. Unseen
/// classes are drawn round-robin over parents in seeded order.
ZslDataset split_scs(const ZslDataset& ds, SplitOptions opts = {});
/// Whole parents (seeded order) are held out until the unseen count reaches
/// the target.
ZslDataset split_sce(const ZslDataset& ds, SplitOptions opts = {});

bool satisfies_scs(const ZslDataset& ds);
bool satisfies_sce(const ZslDataset& ds);

}  // namespace s2ga

#endif  // S2GA_SPLITS_HPP
