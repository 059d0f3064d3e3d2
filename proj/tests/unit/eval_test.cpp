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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "s2ga/eval.hpp"
#include "test_util.hpp"

namespace s2ga {
namespace {

using testing::random_matrix;
using testing::random_regions;
using testing::random_vector;

// AP from the sorted list of hit ranks: mean over hits j of j / rank_j.
double brute_force_ap(const std::vector<std::size_t>& ranking, const std::vector<int>& labels, int query,
                      std::size_t n) {
  std::vector<std::size_t> hit_ranks;
  for (std::size_t pos = 0; pos < std::min(n, ranking.size()); ++pos)
    if (labels[ranking[pos]] == query) hit_ranks.push_back(pos + 1);
  if (hit_ranks.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t j = 0; j < hit_ranks.size(); ++j)
    sum += static_cast<double>(j + 1) / static_cast<double>(hit_ranks[j]);
  return sum / static_cast<double>(hit_ranks.size());
}

TEST(Distance, EuclideanAndCosine) {
  EXPECT_DOUBLE_EQ(distance(Vector{0, 0}, Vector{3, 4}, DistanceKind::euclidean), 5.0);
  EXPECT_NEAR(distance(Vector{1, 0}, Vector{0, 2}, DistanceKind::cosine), 1.0, 1e-15);
  EXPECT_NEAR(distance(Vector{1, 1}, Vector{2, 2}, DistanceKind::cosine), 0.0, 1e-15);
  EXPECT_EQ(parse_distance_kind("cosine"), DistanceKind::cosine);
  EXPECT_THROW(parse_distance_kind("manhattan"), std::invalid_argument);
}

TEST(NearestClass, TieGoesToLowestIndex) {
  const Matrix embedded = Matrix::from_rows({{1.0, -1.0, 1.0}, {0.0, 0.0, 0.0}});
  EXPECT_EQ(nearest_class(Vector{0.0, 0.0}, embedded, DistanceKind::euclidean), 0u);
  EXPECT_EQ(nearest_class(Vector{-0.9, 0.0}, embedded, DistanceKind::euclidean), 1u);
  EXPECT_THROW(nearest_class(Vector{0.0}, Matrix(1, 0), DistanceKind::euclidean), std::invalid_argument);
}

TEST(ClassifyZeroShot, PicksExactEmbedding) {
  Rng rng(1);
  MatcherParams mp = MatcherParams::glorot(4, 3, rng);
  const ClassSemanticTable table(random_matrix(3, 5, rng, 0.0, 1.0), {3, 4, 5, 6, 7});
  for (std::size_t c = 0; c < table.size(); ++c) {
    const Vector u = embed_semantic(table.semantic(c), mp);
    const std::size_t got = classify_zero_shot(u, table, mp);
    EXPECT_EQ(embed_semantic(table.semantic(got), mp), u);
  }
}

TEST(EvaluatePredictions, MicroMacroAndConfusion) {
  const std::vector<int> labels{10, 20};
  const std::vector<int> truth{10, 10, 10, 20};
  const std::vector<int> pred{10, 10, 20, 20};
  const EvalResult r = evaluate_predictions(truth, pred, labels);
  EXPECT_DOUBLE_EQ(r.top1_accuracy, 0.75);
  EXPECT_DOUBLE_EQ(r.macro_accuracy, (2.0 / 3.0 + 1.0) / 2.0);
  EXPECT_EQ(r.confusion[0][1], 1u);
  EXPECT_EQ(r.correct, 3u);
  const std::vector<int> stray{30, 10, 10, 20};
  EXPECT_THROW(evaluate_predictions(stray, pred, labels), std::invalid_argument);
}

TEST(EvaluateAccuracy, RandomModelIsNearChance) {
  const SgaConfig cfg{6, 4, 5, 8, 2};
  const S2gaModel model = S2gaModel::initialize(cfg, 3);
  Rng rng(4);
  const ClassSemanticTable table(random_matrix(5, 5, rng, 0.0, 1.0), {0, 1, 2, 3, 4});
  std::vector<RegionFeatures> images;
  images.reserve(1000);
  for (int i = 0; i < 1000; ++i) images.push_back(random_regions(cfg.p, cfg.m, rng));
  std::vector<LabeledImage> test;
  for (int i = 0; i < 1000; ++i) test.push_back({&images[static_cast<std::size_t>(i)], i % 5});
  const EvalResult r = evaluate_accuracy(model, test, table);
  EXPECT_NEAR(r.top1_accuracy, 0.2, 0.1);
  EXPECT_EQ(r.total, 1000u);
}

TEST(EvaluateAccuracy, RejectsLabelsOutsideCandidates) {
  const SgaConfig cfg{3, 2, 2, 2, 0};
  const S2gaModel model = S2gaModel::zeros(cfg);
  Rng rng(5);
  const RegionFeatures img = random_regions(3, 2, rng);
  const ClassSemanticTable table(Matrix(2, 1), {1});
  const std::vector<LabeledImage> test{{&img, 9}};
  EXPECT_THROW(evaluate_accuracy(model, test, table), std::invalid_argument);
}

TEST(AveragePrecision, ClosedForms) {
  const std::vector<int> labels{1, 0, 1, 0};
  const std::vector<std::size_t> perfect{0, 2, 1, 3};
  const std::vector<std::size_t> worst{1, 3, 0, 2};
  EXPECT_DOUBLE_EQ(average_precision(perfect, labels, 1, 2), 1.0);
  EXPECT_DOUBLE_EQ(average_precision(worst, labels, 1, 2), 0.0);
  // hits at ranks 3 and 4: (1/3 + 2/4) / 2
  EXPECT_DOUBLE_EQ(average_precision(worst, labels, 1, 4), (1.0 / 3.0 + 0.5) / 2.0);
}

TEST(RetrievalMap, MatchesBruteForceOracleOnRandomProblems) {
  Rng rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t pool_size = 5 + static_cast<std::size_t>(trial % 30);
    const int classes = 2 + trial % 4;
    std::vector<int> labels(pool_size);
    for (std::size_t i = 0; i < pool_size; ++i) labels[i] = static_cast<int>(i % static_cast<std::size_t>(classes));
    std::shuffle(labels.begin(), labels.end(), rng);
    std::vector<RankedQuery> queries;
    for (int c = 0; c < classes; ++c) {
      std::vector<std::size_t> order(pool_size);
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::shuffle(order.begin(), order.end(), rng);
      queries.push_back({c, order});
    }
    for (RetrievalDepth depth : {RetrievalDepth::fifty_percent, RetrievalDepth::hundred_percent}) {
      const RetrievalResult r = retrieval_map(queries, labels, depth);
      double mean = 0.0;
      for (std::size_t qi = 0; qi < queries.size(); ++qi) {
        const auto relevant = static_cast<double>(std::count(labels.begin(), labels.end(), queries[qi].label));
        const auto n = static_cast<std::size_t>(std::ceil(depth_ratio(depth) * relevant));
        const double oracle = brute_force_ap(queries[qi].ranking, labels, queries[qi].label, n);
        EXPECT_NEAR(r.average_precision[qi], oracle, 1e-12);
        mean += oracle;
      }
      EXPECT_NEAR(r.mean_ap, mean / static_cast<double>(queries.size()), 1e-12);
    }
  }
}

TEST(RetrievalMap, SingleImageClassUsesCeilingDepth) {
  // One relevant image: at 50% depth n = ceil(0.5) = 1, so only rank 1 counts.
  const std::vector<int> labels{0, 1, 1};
  const std::vector<RankedQuery> first{{0, {0, 1, 2}}};
  const std::vector<RankedQuery> second{{0, {1, 0, 2}}};
  EXPECT_DOUBLE_EQ(retrieval_map(first, labels, RetrievalDepth::fifty_percent).mean_ap, 1.0);
  EXPECT_DOUBLE_EQ(retrieval_map(second, labels, RetrievalDepth::fifty_percent).mean_ap, 0.0);
  const std::vector<RankedQuery> missing{{7, {0, 1, 2}}};
  EXPECT_THROW(retrieval_map(missing, labels, RetrievalDepth::hundred_percent), std::invalid_argument);
}

TEST(RetrievalMap, PerfectEmbeddingGivesUnitMap) {
  Rng rng(7);
  const MatcherParams mp = MatcherParams::glorot(4, 3, rng);
  const ClassSemanticTable table(random_matrix(3, 3, rng, 0.0, 1.0), {0, 1, 2});
  std::vector<Vector> pool;
  std::vector<int> labels;
  for (std::size_t c = 0; c < 3; ++c)
    for (int copy = 0; copy < 4; ++copy) {
      pool.push_back(embed_semantic(table.semantic(c), mp));
      labels.push_back(static_cast<int>(c));
    }
  for (RetrievalDepth depth : {RetrievalDepth::fifty_percent, RetrievalDepth::hundred_percent})
    EXPECT_DOUBLE_EQ(retrieval_map(table, pool, labels, mp, depth).mean_ap, 1.0);
}

TEST(RankImages, StableForEqualDistances) {
  const MatcherParams mp = MatcherParams::zeros(2, 1);
  const std::vector<Vector> pool{Vector{1, 0}, Vector{0, 1}, Vector{0, 0}, Vector{-1, 0}};
  EXPECT_EQ(rank_images(Vector{1.0}, pool, mp), (std::vector<std::size_t>{2, 0, 1, 3}));
}

}  // namespace
}  // namespace s2ga
