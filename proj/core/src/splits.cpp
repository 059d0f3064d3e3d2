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

#include "s2ga/splits.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "s2ga/random.hpp"

namespace s2ga {

namespace {

std::size_t target_unseen(const ZslDataset& ds, double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw SplitError("unseen fraction must lie strictly between 0 and 1");
  }
  const auto n = static_cast<std::size_t>(std::lround(fraction * static_cast<double>(ds.classes.size())));
  return std::max<std::size_t>(1, n);
}

// parent id -> class ids, both sorted
std::map<int, std::vector<int>> by_parent(const ZslDataset& ds) {
  std::map<int, std::vector<int>> out;
  for (const ClassRecord& c : ds.classes) {
    if (c.parent == kNoParent) {
      throw SplitError("class " + std::to_string(c.id) + " has no parent category");
    }
    out[c.parent].push_back(c.id);
  }
  for (auto& [_, ids] : out) std::sort(ids.begin(), ids.end());
  return out;
}

ZslDataset with_split(const ZslDataset& ds, const std::set<int>& unseen) {
  ZslDataset out = ds;
  out.seen.clear();
  out.unseen.clear();
  for (const ClassRecord& c : ds.classes) (unseen.count(c.id) ? out.unseen : out.seen).push_back(c.id);
  std::sort(out.seen.begin(), out.seen.end());
  std::sort(out.unseen.begin(), out.unseen.end());
  return out;
}

std::map<int, int> parent_of(const ZslDataset& ds) {
  std::map<int, int> out;
  for (const ClassRecord& c : ds.classes) out[c.id] = c.parent;
  return out;
}

}  // namespace

ZslDataset split_scs(const ZslDataset& ds, SplitOptions opts) {
  const std::size_t target = target_unseen(ds, opts.unseen_fraction);
  auto groups = by_parent(ds);
  Rng rng(opts.seed);

  std::vector<int> parents;
  for (auto& [parent, ids] : groups) {
    std::shuffle(ids.begin(), ids.end(), rng);
    parents.push_back(parent);
  }
  std::shuffle(parents.begin(), parents.end(), rng);

  // Each parent keeps its first class seen; the rest are candidates.
  std::set<int> unseen;
  for (std::size_t round = 1; unseen.size() < target; ++round) {
    bool progressed = false;
    for (int parent : parents) {
      const auto& ids = groups[parent];
      if (round < ids.size() && unseen.size() < target) {
        unseen.insert(ids[round]);
        progressed = true;
      }
    }
    if (!progressed) {
      throw SplitError("SCS split: parent structure too small for " + std::to_string(target) +
                       " unseen classes");
    }
  }
  return with_split(ds, unseen);
}

ZslDataset split_sce(const ZslDataset& ds, SplitOptions opts) {
  const std::size_t target = target_unseen(ds, opts.unseen_fraction);
  auto groups = by_parent(ds);
  if (groups.size() < 2) throw SplitError("SCE split: need at least two parent categories");
  Rng rng(opts.seed);

  std::vector<int> parents;
  for (const auto& [parent, _] : groups) parents.push_back(parent);
  std::shuffle(parents.begin(), parents.end(), rng);

  std::set<int> unseen;
  std::size_t held_out = 0;
  for (int parent : parents) {
    if (unseen.size() >= target) break;
    unseen.insert(groups[parent].begin(), groups[parent].end());
    ++held_out;
  }
  if (held_out == groups.size()) {
    throw SplitError("SCE split: holding out " + std::to_string(target) +
                     " classes leaves no seen parent category");
  }
  return with_split(ds, unseen);
}

bool satisfies_scs(const ZslDataset& ds) {
  const auto parent = parent_of(ds);
  std::set<int> seen_parents;
  for (int id : ds.seen) seen_parents.insert(parent.at(id));
  return std::all_of(ds.unseen.begin(), ds.unseen.end(), [&](int id) {
    const int pa = parent.at(id);
    return pa != kNoParent && seen_parents.count(pa) > 0;
  });
}

bool satisfies_sce(const ZslDataset& ds) {
  const auto parent = parent_of(ds);
  std::set<int> seen_parents;
  for (int id : ds.seen) seen_parents.insert(parent.at(id));
  return std::none_of(ds.unseen.begin(), ds.unseen.end(), [&](int id) {
    return seen_parents.count(parent.at(id)) > 0;
  });
}

}  // namespace s2ga
