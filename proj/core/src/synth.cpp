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

#include "s2ga/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "s2ga/random.hpp"

namespace s2ga {

namespace {

// Spread of class semantics around their group centre, before normalisation.
constexpr double kClassSpread = 0.3;
// Column norm of every signal map.
constexpr double kSignalGain = 3.0;

std::size_t parent_count(std::size_t num_classes) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(
                                      std::lround(std::sqrt(static_cast<double>(num_classes)))));
}

}  // namespace

void SynthSpec::validate() const {
  if (num_classes < 1 || images_per_class < 1 || p < 1 || m < 1 || q < 1) {
    throw std::invalid_argument("SynthSpec: classes, images per class, p, m, q must be >= 1");
  }
  if (signal_regions < 1 || signal_regions > m) {
    throw std::invalid_argument("SynthSpec: signal_regions must be in [1, m]");
  }
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw std::invalid_argument("SynthSpec: noise_sigma must be finite and >= 0");
  }
}

std::vector<int> kmeans_assign(const Matrix& points, std::size_t k, std::uint64_t seed) {
  const std::size_t n = points.cols();
  if (k == 0 || k > n) throw std::invalid_argument("kmeans_assign: need 1 <= k <= #points");
  Rng rng(seed);
  std::vector<Vector> cols;
  cols.reserve(n);
  for (std::size_t i = 0; i < n; ++i) cols.push_back(points.col(i));

  // k-means++ seeding
  std::vector<Vector> centres;
  centres.push_back(cols[std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)]);
  std::vector<double> d2(n);
  while (centres.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const Vector& c : centres) best = std::min(best, squared_distance(cols[i], c));
      d2[i] = best;
      total += best;
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      double r = std::uniform_real_distribution<double>(0.0, total)(rng);
      while (pick + 1 < n && r >= d2[pick]) r -= d2[pick++];
    } else {
      pick = centres.size();
    }
    centres.push_back(cols[pick]);
  }

  std::vector<int> assign(n, -1);
  for (int iter = 0; iter < 200; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const double dist = squared_distance(cols[i], centres[c]);
        if (dist < best_d) {
          best_d = dist;
          best = static_cast<int>(c);
        }
      }
      if (assign[i] != best) {
        assign[i] = best;
        changed = true;
      }
    }
    // Empty clusters take the point farthest from its centre.
    for (std::size_t c = 0; c < k; ++c) {
      if (std::count(assign.begin(), assign.end(), static_cast<int>(c)) != 0) continue;
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double dist = squared_distance(cols[i], centres[static_cast<std::size_t>(assign[i])]);
        const bool donor_ok =
            std::count(assign.begin(), assign.end(), assign[i]) > 1;
        if (donor_ok && dist > far_d) {
          far_d = dist;
          far = i;
        }
      }
      assign[far] = static_cast<int>(c);
      changed = true;
    }
    for (std::size_t c = 0; c < k; ++c) {
      Vector mean(points.rows());
      std::size_t count = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (assign[i] != static_cast<int>(c)) continue;
        axpy(1.0, cols[i], mean);
        ++count;
      }
      centres[c] = scale(mean, 1.0 / static_cast<double>(count));
    }
    if (!changed) break;
  }

  // Relabel clusters in order of first appearance.
  std::vector<int> relabel(k, -1);
  int next = 0;
  for (int& a : assign) {
    if (relabel[static_cast<std::size_t>(a)] < 0) relabel[static_cast<std::size_t>(a)] = next++;
    a = relabel[static_cast<std::size_t>(a)];
  }
  return assign;
}

SynthResult synth_generate_with_truth(const SynthSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const std::size_t groups = parent_count(spec.num_classes);

  std::vector<Vector> centres;
  for (std::size_t g = 0; g < groups; ++g) {
    Vector c(spec.q);
    fill_uniform(c.values(), rng, 0.0, 1.0);
    centres.push_back(std::move(c));
  }

  SynthResult out;
  ZslDataset& ds = out.dataset;
  ds.p = spec.p;
  ds.m = spec.m;
  ds.q = spec.q;

  Matrix semantics(spec.q, spec.num_classes);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t c = 0; c < spec.num_classes; ++c) {
    const Vector& centre = centres[c % groups];
    Vector s(spec.q);
    for (std::size_t t = 0; t < spec.q; ++t) s[t] = centre[t] + kClassSpread * gauss(rng);
    const auto top = static_cast<std::size_t>(std::max_element(s.values().begin(), s.values().end()) -
                                              s.values().begin());
    s = relu(s);
    if (s[top] == 0.0) s[top] = 1.0;
    semantics.set_col(c, scale(s, 1.0 / norm(s)));
  }

  // Non-negative maps whose columns have disjoint row supports, so every
  // class signal has norm kSignalGain.
  std::vector<std::size_t> rows(spec.p);
  for (std::size_t j = 0; j < spec.signal_regions; ++j) {
    Matrix a(spec.p, spec.q);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    std::shuffle(rows.begin(), rows.end(), rng);
    for (std::size_t r = 0; r < spec.p; ++r) a(rows[r], r % spec.q) = std::abs(gauss(rng)) + 0.5;
    for (std::size_t t = 0; t < spec.q; ++t) {
      const double n = norm(a.col(t));
      if (n > 0.0) a.set_col(t, scale(a.col(t), kSignalGain / n));
    }
    out.truth.signal_maps.push_back(std::move(a));
  }

  std::vector<std::size_t> positions(spec.m);
  for (std::size_t c = 0; c < spec.num_classes; ++c) {
    std::iota(positions.begin(), positions.end(), std::size_t{0});
    std::shuffle(positions.begin(), positions.end(), rng);
    std::vector<std::size_t> chosen(positions.begin(),
                                    positions.begin() + static_cast<std::ptrdiff_t>(spec.signal_regions));
    std::sort(chosen.begin(), chosen.end());
    out.truth.signal_regions[static_cast<int>(c)] = std::move(chosen);
  }

  const std::vector<int> parents = kmeans_assign(semantics, groups, spec.seed ^ 0x9e3779b97f4a7c15ULL);
  for (std::size_t c = 0; c < spec.num_classes; ++c) {
    ds.classes.push_back({static_cast<int>(c), parents[c], semantics.col(c)});
    ds.seen.push_back(static_cast<int>(c));
  }

  int image_id = 0;
  for (std::size_t c = 0; c < spec.num_classes; ++c) {
    const Vector s = semantics.col(c);
    std::vector<Vector> signal;
    for (const Matrix& a : out.truth.signal_maps) signal.push_back(matvec(a, s));
    const auto& where = out.truth.signal_regions.at(static_cast<int>(c));
    for (std::size_t n = 0; n < spec.images_per_class; ++n) {
      Matrix features(spec.p, spec.m);
      fill_normal(features.values(), rng, 0.0, 1.0);
      for (double& v : features.values()) v *= spec.noise_sigma;
      for (std::size_t j = 0; j < where.size(); ++j)
        for (std::size_t r = 0; r < spec.p; ++r) features(r, where[j]) += signal[j][r];
      ds.images.push_back({image_id++, static_cast<int>(c), RegionFeatures(std::move(features))});
    }
  }
  ds.validate();
  return out;
}

ZslDataset synth_generate(const SynthSpec& spec) {
  return synth_generate_with_truth(spec).dataset;
}

double noiseless_oracle_accuracy(const ZslDataset& ds, const SynthTruth& truth) {
  if (ds.images.empty()) return 0.0;
  std::size_t correct = 0;
  for (const ImageRecord& im : ds.images) {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (const ClassRecord& c : ds.classes) {
      const auto& where = truth.signal_regions.at(c.id);
      double dist = 0.0;
      for (std::size_t j = 0; j < where.size(); ++j) {
        dist += squared_distance(im.regions.features().col(where[j]),
                                 matvec(truth.signal_maps[j], c.semantic));
      }
      if (dist < best_d) {
        best_d = dist;
        best = c.id;
      }
    }
    if (best == im.class_id) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(ds.images.size());
}

}  // namespace s2ga
