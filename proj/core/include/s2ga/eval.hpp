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

// Zero-shot classification and retrieval evaluation.

#ifndef S2GA_EVAL_HPP
#define S2GA_EVAL_HPP

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "s2ga/matcher.hpp"
#include "s2ga/model.hpp"

namespace s2ga {

enum class DistanceKind { euclidean, cosine };

DistanceKind parse_distance_kind(std::string_view name);
double distance(const Vector& a, const Vector& b, DistanceKind kind);

/// Index of the nearest column of `embedded` (p x C); ties go to the lowest index.
std::size_t nearest_class(const Vector& u_t, const Matrix& embedded, DistanceKind kind);

/// Nearest unseen class in the visual space; returns the column index into `candidates`.
std::size_t classify_zero_shot(const Vector& u_t, const ClassSemanticTable& candidates,
                               const MatcherParams& matcher,
                               DistanceKind kind = DistanceKind::euclidean);

struct EvalResult {
  double top1_accuracy = 0.0;   // micro: correct / total
  double macro_accuracy = 0.0;  // mean of per-class accuracies
  std::vector<int> labels;      // candidate class ids, in table order
  std::vector<double> per_class_accuracy;
  std::vector<std::size_t> per_class_count;
  std::vector<std::vector<std::size_t>> confusion;  // [true][predicted]
  std::size_t correct = 0;
  std::size_t total = 0;
};

/// Scores predicted vs. true class ids against the candidate id list.
/// Throws std::invalid_argument for ids outside `labels`.
EvalResult evaluate_predictions(std::span<const int> truth, std::span<const int> predicted,
                                std::span<const int> labels);

struct LabeledImage {
  const RegionFeatures* regions = nullptr;
  int label = 0;
};

EvalResult evaluate_accuracy(const S2gaModel& model, std::span<const LabeledImage> test,
                             const ClassSemanticTable& candidates,
                             DistanceKind kind = DistanceKind::euclidean);

/// Pool indices sorted by ascending Euclidean distance to the embedded query
/// (stable: equal distances keep pool order).
std::vector<std::size_t> rank_images(const Vector& query, std::span<const Vector> pool,
                                     const MatcherParams& matcher);

enum class RetrievalDepth { fifty_percent, hundred_percent };

double depth_ratio(RetrievalDepth depth);

struct RetrievalResult {
  std::vector<int> query_labels;
  std::vector<double> average_precision;
  double mean_ap = 0.0;
  RetrievalDepth depth = RetrievalDepth::hundred_percent;
};

/// Mean of precision@i over the relevant hits i within the first `depth`
/// ranked items; 0 when there is no hit.
double average_precision(std::span<const std::size_t> ranking, std::span<const int> pool_labels,
                         int relevant_label, std::size_t depth);

struct RankedQuery {
  int label = 0;
  std::vector<std::size_t> ranking;
};

/// Depth per query is ceil(ratio * #pool items labelled like the query).
RetrievalResult retrieval_map(std::span<const RankedQuery> queries, std::span<const int> pool_labels,
                              RetrievalDepth depth);

RetrievalResult retrieval_map(const ClassSemanticTable& queries, std::span<const Vector> pool,
                              std::span<const int> pool_labels, const MatcherParams& matcher,
                              RetrievalDepth depth);

}  // namespace s2ga

#endif  // S2GA_EVAL_HPP
