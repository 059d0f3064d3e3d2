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

#include "s2ga/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace s2ga {

DistanceKind parse_distance_kind(std::string_view name) {
  if (name == "euclidean") return DistanceKind::euclidean;
  if (name == "cosine") return DistanceKind::cosine;
  throw std::invalid_argument("unknown distance '" + std::string(name) + "'");
}

double distance(const Vector& a, const Vector& b, DistanceKind kind) {
  if (kind == DistanceKind::euclidean) return std::sqrt(squared_distance(a, b));
  const double na = norm(a);
  const double nb = norm(b);
  if (na == 0.0 || nb == 0.0) return 1.0;
  return 1.0 - dot(a, b) / (na * nb);
}

std::size_t nearest_class(const Vector& u_t, const Matrix& embedded, DistanceKind kind) {
  if (embedded.cols() == 0) throw std::invalid_argument("classify_zero_shot: no candidate classes");
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < embedded.cols(); ++c) {
    const double d = distance(u_t, embedded.col(c), kind);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

std::size_t classify_zero_shot(const Vector& u_t, const ClassSemanticTable& candidates,
                               const MatcherParams& matcher, DistanceKind kind) {
  if (candidates.size() == 0) throw std::invalid_argument("classify_zero_shot: empty candidate table");
  return nearest_class(u_t, embed_all(candidates, matcher), kind);
}

EvalResult evaluate_predictions(std::span<const int> truth, std::span<const int> predicted,
                                std::span<const int> labels) {
  if (truth.size() != predicted.size()) {
    throw std::invalid_argument("evaluate_predictions: truth/prediction length mismatch");
  }
  auto index_of = [&](int id, const char* what) {
    auto it = std::find(labels.begin(), labels.end(), id);
    if (it == labels.end()) {
      throw std::invalid_argument(std::string("evaluate: ") + what + " class " + std::to_string(id) +
                                  " is not among the candidate classes");
    }
    return static_cast<std::size_t>(it - labels.begin());
  };
  const std::size_t classes = labels.size();
  EvalResult r;
  r.labels.assign(labels.begin(), labels.end());
  r.confusion.assign(classes, std::vector<std::size_t>(classes, 0));
  r.per_class_count.assign(classes, 0);
  r.per_class_accuracy.assign(classes, 0.0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const std::size_t t = index_of(truth[i], "true");
    const std::size_t p = index_of(predicted[i], "predicted");
    ++r.confusion[t][p];
    ++r.per_class_count[t];
    if (t == p) ++r.correct;
  }
  r.total = truth.size();
  r.top1_accuracy = r.total == 0 ? 0.0 : static_cast<double>(r.correct) / static_cast<double>(r.total);
  std::size_t present = 0;
  double macro = 0.0;
  for (std::size_t c = 0; c < classes; ++c) {
    if (r.per_class_count[c] == 0) continue;
    r.per_class_accuracy[c] =
        static_cast<double>(r.confusion[c][c]) / static_cast<double>(r.per_class_count[c]);
    macro += r.per_class_accuracy[c];
    ++present;
  }
  r.macro_accuracy = present == 0 ? 0.0 : macro / static_cast<double>(present);
  return r;
}

EvalResult evaluate_accuracy(const S2gaModel& model, std::span<const LabeledImage> test,
                             const ClassSemanticTable& candidates, DistanceKind kind) {
  if (candidates.size() == 0) throw std::invalid_argument("evaluate_accuracy: empty candidate table");
  const Matrix embedded = embed_all(candidates, model.matcher);
  std::vector<int> truth;
  std::vector<int> predicted;
  truth.reserve(test.size());
  predicted.reserve(test.size());
  for (const LabeledImage& im : test) {
    if (!candidates.index_of(im.label)) {
      throw std::invalid_argument("evaluate_accuracy: test label " + std::to_string(im.label) +
                                  " is not a candidate class");
    }
    const Vector u = encode(model, *im.regions);
    truth.push_back(im.label);
    predicted.push_back(candidates.labels()[nearest_class(u, embedded, kind)]);
  }
  return evaluate_predictions(truth, predicted, candidates.labels());
}

std::vector<std::size_t> rank_images(const Vector& query, std::span<const Vector> pool,
                                     const MatcherParams& matcher) {
  const Vector v = embed_semantic(query, matcher);
  std::vector<double> dist(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) dist[i] = squared_distance(v, pool[i]);
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });
  return order;
}

double depth_ratio(RetrievalDepth depth) {
  return depth == RetrievalDepth::fifty_percent ? 0.5 : 1.0;
}

double average_precision(std::span<const std::size_t> ranking, std::span<const int> pool_labels,
                         int relevant_label, std::size_t depth) {
  const std::size_t n = std::min(depth, ranking.size());
  std::size_t hits = 0;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (pool_labels[ranking[i]] != relevant_label) continue;
    ++hits;
    sum += static_cast<double>(hits) / static_cast<double>(i + 1);
  }
  return hits == 0 ? 0.0 : sum / static_cast<double>(hits);
}

RetrievalResult retrieval_map(std::span<const RankedQuery> queries, std::span<const int> pool_labels,
                              RetrievalDepth depth) {
  RetrievalResult r;
  r.depth = depth;
  const double ratio = depth_ratio(depth);
  for (const RankedQuery& q : queries) {
    const auto relevant = static_cast<std::size_t>(
        std::count(pool_labels.begin(), pool_labels.end(), q.label));
    if (relevant == 0) {
      throw std::invalid_argument("retrieval_map: class " + std::to_string(q.label) +
                                  " has no images in the pool");
    }
    const auto n = static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(relevant)));
    r.query_labels.push_back(q.label);
    r.average_precision.push_back(average_precision(q.ranking, pool_labels, q.label, n));
  }
  if (!r.average_precision.empty()) {
    r.mean_ap = std::accumulate(r.average_precision.begin(), r.average_precision.end(), 0.0) /
                static_cast<double>(r.average_precision.size());
  }
  return r;
}

RetrievalResult retrieval_map(const ClassSemanticTable& queries, std::span<const Vector> pool,
                              std::span<const int> pool_labels, const MatcherParams& matcher,
                              RetrievalDepth depth) {
  if (pool.size() != pool_labels.size()) {
    throw std::invalid_argument("retrieval_map: pool/label length mismatch");
  }
  if (pool.empty()) throw std::invalid_argument("retrieval_map: empty pool");
  std::vector<RankedQuery> ranked;
  ranked.reserve(queries.size());
  for (std::size_t c = 0; c < queries.size(); ++c) {
    ranked.push_back({queries.labels()[c], rank_images(queries.semantic(c), pool, matcher)});
  }
  return retrieval_map(ranked, pool_labels, depth);
}

}  // namespace s2ga
