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

#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "s2ga/model.hpp"
#include "s2ga/model_io.hpp"
#include "s2ga/trainer.hpp"
#include "test_util.hpp"

namespace s2ga {
namespace {

using testing::random_matrix;
using testing::random_regions;

S2gaModel random_model(const SgaConfig& cfg, std::uint64_t seed) {
  S2gaModel model = S2gaModel::initialize(cfg, seed);
  Rng rng(seed + 1);
  for (auto& l : model.layers) l.b_p = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
  fill_uniform(model.matcher.b_e.values(), rng, -0.2, 0.2);
  return model;
}

TEST(S2gaModel, CanonicalBlockOrder) {
  const S2gaModel model = S2gaModel::zeros(SgaConfig{4, 3, 2, 5, 2});
  std::vector<std::string> names;
  for (const auto& b : model.blocks()) names.push_back(b.name);
  const std::vector<std::string> expected{"layer0.w_ia", "layer0.w_gs", "layer0.w_ga", "layer0.w_p",
                                          "layer0.b_p",  "layer1.w_ia", "layer1.w_gs", "layer1.w_ga",
                                          "layer1.w_p",  "layer1.b_p",  "matcher.w_e", "matcher.b_e"};
  EXPECT_EQ(names, expected);
  // 2 * (5*4 + 2*4 + 5*2 + 5 + 1) + 4*2 + 4
  EXPECT_EQ(model.parameter_count(), 2u * 44u + 12u);
}

TEST(S2gaModel, FlattenAssignRoundTrip) {
  const S2gaModel a = random_model(SgaConfig{4, 3, 2, 5, 2}, 3);
  S2gaModel b = S2gaModel::zeros(a.config);
  b.assign(a.flatten().values());
  EXPECT_EQ(a.flatten(), b.flatten());
  EXPECT_THROW(b.assign(Vector(3).values()), DimensionError);
}

TEST(S2gaModel, InitializeIsSeeded) {
  const SgaConfig cfg{4, 3, 2, 5, 1};
  EXPECT_EQ(S2gaModel::initialize(cfg, 9).flatten(), S2gaModel::initialize(cfg, 9).flatten());
  EXPECT_NE(S2gaModel::initialize(cfg, 9).flatten(), S2gaModel::initialize(cfg, 10).flatten());
}

TEST(TotalLoss, ZeroWeightsIsMeanCrossEntropy) {
  const SgaConfig cfg{5, 3, 4, 6, 2};
  const S2gaModel model = random_model(cfg, 4);
  Rng rng(5);
  const std::vector<RegionFeatures> imgs{random_regions(5, 3, rng), random_regions(5, 3, rng)};
  const ClassSemanticTable seen(random_matrix(4, 3, rng, 0.0, 1.0), {0, 1, 2});
  const std::vector<LabeledRegions> batch{{&imgs[0], 2}, {&imgs[1], 0}};
  const LossBreakdown l = total_loss(model, batch, seen, {0.0, 0.0});
  EXPECT_DOUBLE_EQ(l.total, l.classify);
}

TEST(TotalLoss, MatchesHandComposition) {
  const SgaConfig cfg{5, 3, 4, 6, 2};
  const S2gaModel model = random_model(cfg, 6);
  Rng rng(7);
  const std::vector<RegionFeatures> imgs{random_regions(5, 3, rng), random_regions(5, 3, rng),
                                         random_regions(5, 3, rng)};
  const ClassSemanticTable seen(random_matrix(4, 3, rng, 0.0, 1.0), {0, 1, 2});
  const std::vector<LabeledRegions> batch{{&imgs[0], 1}, {&imgs[1], 0}, {&imgs[2], 1}};
  const LossWeights w{0.3, 0.8};

  const Matrix embedded = embed_all(seen, model.matcher);
  double expected = 0.0;
  for (const LabeledRegions& ex : batch) {
    const SgaForward f = sga_forward(*ex.regions, cfg, model.layers);
    double guide = 0.0;
    for (const LayerTrace& t : f.trace.layers) guide += guide_loss(t.guide_mid, seen.semantic(ex.class_index));
    expected += classify_loss(class_probs(f.u_g, embedded), ex.class_index) +
                w.align * align_loss(embedded.col(ex.class_index), f.u_g) + w.guide * guide;
  }
  expected /= static_cast<double>(batch.size());
  EXPECT_NEAR(total_loss(model, batch, seen, w).total, expected, 1e-10);
}

TEST(TotalLoss, PerfectFitIsNearZero) {
  // K = 0, so u_g is the region mean (6, 8). Class 0 embeds exactly onto it and
  // class 1 onto zero, a score gap of 100.
  const SgaConfig cfg{2, 2, 2, 3, 0};
  S2gaModel model = S2gaModel::zeros(cfg);
  model.matcher.w_e = Matrix::from_rows({{6.0, 0.0}, {8.0, 0.0}});
  const RegionFeatures img(Matrix::from_rows({{6.0, 6.0}, {8.0, 8.0}}));
  const ClassSemanticTable seen(Matrix::from_rows({{1.0, 0.0}, {0.0, 1.0}}), {0, 1});
  const std::vector<LabeledRegions> batch{{&img, 0}};
  const LossBreakdown l = total_loss(model, batch, seen, {1.0, 1.0});
  EXPECT_LT(l.classify, 1e-30);
  EXPECT_EQ(l.align, 0.0);
  EXPECT_EQ(l.guide, 0.0);
}

TEST(TotalLoss, RejectsBadBatches) {
  const SgaConfig cfg{5, 3, 4, 6, 1};
  const S2gaModel model = random_model(cfg, 8);
  Rng rng(9);
  const RegionFeatures img = random_regions(5, 3, rng);
  const ClassSemanticTable seen(random_matrix(4, 2, rng), {0, 1});
  const ClassSemanticTable wrong_q(random_matrix(3, 2, rng), {0, 1});
  const std::vector<LabeledRegions> ok{{&img, 1}};
  const std::vector<LabeledRegions> out{{&img, 2}};
  EXPECT_THROW(total_loss(model, {}, seen, {}), std::invalid_argument);
  EXPECT_THROW(total_loss(model, out, seen, {}), std::out_of_range);
  EXPECT_THROW(total_loss(model, ok, wrong_q, {}), DimensionError);
}

TEST(LossAndGradient, LossAgreesWithTotalLoss) {
  const SgaConfig cfg{5, 3, 4, 6, 2};
  const S2gaModel model = random_model(cfg, 10);
  Rng rng(11);
  const std::vector<RegionFeatures> imgs{random_regions(5, 3, rng), random_regions(5, 3, rng)};
  const ClassSemanticTable seen(random_matrix(4, 2, rng, 0.0, 1.0), {0, 1});
  const std::vector<LabeledRegions> batch{{&imgs[0], 0}, {&imgs[1], 1}};
  EXPECT_DOUBLE_EQ(loss_and_gradient(model, batch, seen, {}).loss.total, total_loss(model, batch, seen, {}).total);
}

TEST(GradCheck, AllDepthsPassAtTightTolerance) {
  for (std::size_t k = 0; k <= 3; ++k) {
    const GradCheckReport r = grad_check(SgaConfig{8, 4, 5, 6, k}, 2, 1e-5, 17);
    EXPECT_TRUE(r.passed) << "K=" << k << " max=" << r.max_rel_error;
    EXPECT_EQ(r.blocks.size(), 5 * k + 2);
  }
}

TEST(GradCheck, ZeroToleranceFailsInfiniteTolerancePasses) {
  const SgaConfig cfg{4, 3, 3, 4, 1};
  EXPECT_FALSE(grad_check(cfg, 1, 0.0).passed);
  EXPECT_TRUE(grad_check(cfg, 1, std::numeric_limits<double>::infinity()).passed);
}

TEST(GradientRelativeError, UsesFloorForTinyValues) {
  EXPECT_DOUBLE_EQ(gradient_relative_error(2.0, 1.0), 0.5);
  EXPECT_DOUBLE_EQ(gradient_relative_error(1e-9, 0.0), 1e-9 / kGradCheckFloor);
  EXPECT_DOUBLE_EQ(gradient_relative_error(0.0, 0.0), 0.0);
}

TEST(ModelIo, RoundTripIsExact) {
  const S2gaModel a = random_model(SgaConfig{4, 3, 2, 5, 2}, 12);
  std::stringstream ss;
  write_model(a, ss);
  const S2gaModel b = read_model(ss);
  EXPECT_EQ(b.config, a.config);
  EXPECT_EQ(b.flatten(), a.flatten());
  std::stringstream again;
  write_model(b, again);
  std::stringstream first;
  write_model(a, first);
  EXPECT_EQ(again.str(), first.str());
}

TEST(ModelIo, HeaderStartsWithMagic) {
  std::stringstream ss;
  write_model(S2gaModel::zeros(SgaConfig{4, 3, 2, 5, 1}), ss);
  std::string line;
  std::getline(ss, line);
  EXPECT_EQ(line, "S2GA-MODEL v1 p=4 m=3 q=2 d=5 k=1");
}

TEST(ModelIo, ReportsLineOfBadInput) {
  std::stringstream ss;
  write_model(S2gaModel::zeros(SgaConfig{2, 2, 2, 2, 0}), ss);
  std::string text = ss.str();
  text.replace(text.find("BLOCK matcher.b_e"), 17, "BLOCK matcher.xx");
  std::stringstream bad(text);
  try {
    read_model(bad);
    FAIL() << "expected an error";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("line"), std::string::npos) << e.what();
  }
  std::stringstream junk("not a model\n");
  EXPECT_THROW(read_model(junk), std::runtime_error);
}

}  // namespace
}  // namespace s2ga
