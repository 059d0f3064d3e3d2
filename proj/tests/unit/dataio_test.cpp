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

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <string>

#include "s2ga/dataset.hpp"
#include "s2ga/metrics.hpp"
#include "s2ga/pca.hpp"
#include "s2ga/splits.hpp"
#include "s2ga/synth.hpp"
#include "test_util.hpp"

namespace s2ga {
namespace {

using testing::random_matrix;
using testing::TempDir;

SynthSpec small_spec(std::uint64_t seed = 3) {
  SynthSpec s;
  s.num_classes = 9;
  s.images_per_class = 4;
  s.p = 6;
  s.m = 4;
  s.q = 5;
  s.signal_regions = 2;
  s.seed = seed;
  return s;
}

std::string to_text(const ZslDataset& ds) {
  std::ostringstream out;
  write_dataset(ds, out);
  return out.str();
}

std::size_t error_line(const std::string& text) {
  std::istringstream in(text);
  try {
    read_dataset(in);
  } catch (const DatasetFormatError& e) {
    return e.line();
  }
  return 0;
}

TEST(Dataset, RoundTripIsByteIdenticalAfterFirstWrite) {
  const ZslDataset ds = split_scs(synth_generate(small_spec()), {0.3, 1});
  const std::string first = to_text(ds);
  std::istringstream in(first);
  const ZslDataset back = read_dataset(in);
  EXPECT_EQ(to_text(back), first);
  EXPECT_EQ(back.seen, ds.seen);
  EXPECT_EQ(back.unseen, ds.unseen);
  ASSERT_EQ(back.images.size(), ds.images.size());
  for (std::size_t i = 0; i < ds.images.size(); ++i) {
    const auto a = ds.images[i].regions.features().values();
    const auto b = back.images[i].regions.features().values();
    for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a[k], b[k], 1e-8 * std::max(1.0, std::abs(a[k])));
  }
}

TEST(Dataset, SaveAndLoadThroughFile) {
  TempDir dir("dataset");
  const ZslDataset ds = synth_generate(small_spec());
  save_dataset(ds, dir.file("d.zsl"));
  EXPECT_EQ(to_text(load_dataset(dir.file("d.zsl"))), to_text(ds));
  EXPECT_THROW(load_dataset(dir.file("missing.zsl")), std::runtime_error);
}

TEST(Dataset, FormatErrorsReportLineNumbers) {
  const std::string header = "ZSLDS v1 p=2 m=1 q=2\n";
  const std::string cls = "CLASS 0 -1 1,0\n";
  EXPECT_EQ(error_line("garbage\n"), 1u);
  EXPECT_EQ(error_line(header + "CLASS 0 -1 1,0,3\n"), 2u);
  EXPECT_EQ(error_line(header + cls + "IMAGE 0 0 1,x\n"), 3u);
  EXPECT_EQ(error_line(header + cls + "IMAGE 0 5 1,2\n"), 3u);
  EXPECT_EQ(error_line(header + cls + "IMAGE 0 0 1,2\nBOGUS\n"), 4u);
  EXPECT_EQ(error_line(header + cls + "IMAGE 0 0 1,2\nSPLIT SEEN 0\nSPLIT UNSEEN 9\n"), 5u);
  std::istringstream ok(header + cls + "IMAGE 0 0 1,2\nSPLIT SEEN 0\nSPLIT UNSEEN\n");
  EXPECT_NO_THROW(read_dataset(ok));
}

TEST(Dataset, ValidateRejectsBrokenInvariants) {
  ZslDataset ds = synth_generate(small_spec());
  ds.unseen.push_back(ds.seen.front());
  EXPECT_THROW(ds.validate(), std::invalid_argument);
  ds = synth_generate(small_spec());
  ds.classes[0].semantic = Vector(2);
  EXPECT_THROW(ds.validate(), std::invalid_argument);
}

TEST(Synth, DeterministicUnderSeed) {
  EXPECT_EQ(to_text(synth_generate(small_spec(5))), to_text(synth_generate(small_spec(5))));
  EXPECT_NE(to_text(synth_generate(small_spec(5))), to_text(synth_generate(small_spec(6))));
}

TEST(Synth, SemanticsAreNonNegativeUnitVectors) {
  SynthSpec spec = small_spec();
  spec.num_classes = 30;
  for (const ClassRecord& c : synth_generate(spec).classes) {
    EXPECT_NEAR(norm(c.semantic), 1.0, 1e-12);
    for (double v : c.semantic.values()) EXPECT_GE(v, 0.0);
    EXPECT_NE(c.parent, kNoParent);
  }
}

TEST(Synth, NoiselessImagesOfAClassAreIdentical) {
  SynthSpec spec = small_spec();
  spec.noise_sigma = 0.0;
  const SynthResult r = synth_generate_with_truth(spec);
  for (const ImageRecord& im : r.dataset.images) {
    const ImageRecord& first = *r.dataset.images_of(std::vector<int>{im.class_id}).front();
    EXPECT_EQ(im.regions.features(), first.regions.features());
    const auto& signal = r.truth.signal_regions.at(im.class_id);
    for (std::size_t i = 0; i < spec.m; ++i) {
      const bool is_signal = std::find(signal.begin(), signal.end(), i) != signal.end();
      EXPECT_EQ(norm(im.regions.features().col(i)) > 0.0, is_signal);
    }
  }
  EXPECT_DOUBLE_EQ(noiseless_oracle_accuracy(r.dataset, r.truth), 1.0);
}

TEST(Synth, OracleAccuracyDegradesWithNoise) {
  SynthSpec spec = small_spec(8);
  spec.num_classes = 20;
  spec.images_per_class = 20;
  std::vector<double> acc;
  for (double sigma : {0.0, 0.5, 2.0, 8.0}) {
    spec.noise_sigma = sigma;
    const SynthResult r = synth_generate_with_truth(spec);
    acc.push_back(noiseless_oracle_accuracy(r.dataset, r.truth));
  }
  EXPECT_DOUBLE_EQ(acc[0], 1.0);
  for (std::size_t i = 1; i < acc.size(); ++i) EXPECT_LE(acc[i], acc[i - 1]);
  EXPECT_LT(acc.back(), 0.5);
}

TEST(Synth, RejectsBadSpecs) {
  SynthSpec spec = small_spec();
  spec.signal_regions = 0;
  EXPECT_THROW(synth_generate(spec), std::invalid_argument);
  spec = small_spec();
  spec.signal_regions = spec.m + 1;
  EXPECT_THROW(synth_generate(spec), std::invalid_argument);
  spec = small_spec();
  spec.noise_sigma = -1.0;
  EXPECT_THROW(synth_generate(spec), std::invalid_argument);
}

TEST(KMeans, SeparatesObviousClusters) {
  // Two tight blobs around (0, 0) and (10, 10).
  Rng rng(1);
  Matrix pts(2, 20);
  for (std::size_t i = 0; i < 20; ++i) {
    const double base = i < 10 ? 0.0 : 10.0;
    pts(0, i) = base + std::uniform_real_distribution<double>(-0.1, 0.1)(rng);
    pts(1, i) = base + std::uniform_real_distribution<double>(-0.1, 0.1)(rng);
  }
  const std::vector<int> a = kmeans_assign(pts, 2, 4);
  for (std::size_t i = 0; i < 20; ++i) EXPECT_EQ(a[i] == a[0], i < 10);
  EXPECT_EQ(kmeans_assign(pts, 2, 4), a);
  EXPECT_THROW(kmeans_assign(pts, 21, 4), std::invalid_argument);
}

ZslDataset parents_dataset(std::size_t parents, std::size_t per_parent) {
  ZslDataset ds;
  ds.p = 1;
  ds.m = 1;
  ds.q = 1;
  int id = 0;
  for (std::size_t pa = 0; pa < parents; ++pa)
    for (std::size_t k = 0; k < per_parent; ++k) {
      ds.classes.push_back({id, static_cast<int>(pa), Vector{1.0}});
      ds.seen.push_back(id++);
    }
  return ds;
}

TEST(Splits, PredicatesHoldAcrossSeeds) {
  SynthSpec spec = small_spec();
  spec.num_classes = 25;
  const ZslDataset ds = synth_generate(spec);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ZslDataset scs = split_scs(ds, {0.25, seed});
    EXPECT_TRUE(satisfies_scs(scs));
    EXPECT_FALSE(scs.unseen.empty());
    EXPECT_NO_THROW(scs.validate());
    const ZslDataset sce = split_sce(ds, {0.25, seed});
    EXPECT_TRUE(satisfies_sce(sce));
    EXPECT_FALSE(sce.seen.empty());
    EXPECT_NO_THROW(sce.validate());
  }
}

TEST(Splits, SceHoldsOutExactlyOneWholeParent) {
  const ZslDataset ds = parents_dataset(4, 5);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ZslDataset sce = split_sce(ds, {0.25, seed});
    ASSERT_EQ(sce.unseen.size(), 5u);
    std::set<int> held;
    for (int id : sce.unseen) held.insert(sce.class_by_id(id).parent);
    EXPECT_EQ(held.size(), 1u);
    EXPECT_EQ(split_sce(ds, {0.25, seed}).unseen, sce.unseen);
  }
}

TEST(Splits, ScsKeepsEveryParentSeen) {
  const ZslDataset scs = split_scs(parents_dataset(4, 5), {0.5, 2});
  EXPECT_EQ(scs.unseen.size(), 10u);
  std::set<int> seen_parents;
  for (int id : scs.seen) seen_parents.insert(scs.class_by_id(id).parent);
  EXPECT_EQ(seen_parents.size(), 4u);
}

TEST(Splits, Errors) {
  EXPECT_THROW(split_scs(parents_dataset(2, 1), {0.5, 0}), SplitError);
  EXPECT_THROW(split_sce(parents_dataset(1, 4), {0.5, 0}), SplitError);
  EXPECT_THROW(split_scs(parents_dataset(2, 3), {1.0, 0}), SplitError);
  ZslDataset orphan = parents_dataset(2, 3);
  orphan.classes[0].parent = kNoParent;
  EXPECT_THROW(split_sce(orphan, {0.5, 0}), SplitError);
}

TEST(Pca, MatchesEigenSelfAdjointSolver) {
  Rng rng(11);
  const std::size_t q = 7;
  const std::size_t n = 30;
  // Anisotropic data so the spectrum is well separated.
  Matrix data = random_matrix(q, n, rng);
  for (std::size_t r = 0; r < q; ++r)
    for (std::size_t c = 0; c < n; ++c) data(r, c) *= static_cast<double>(q - r);

  Eigen::MatrixXd x(q, n);
  for (std::size_t r = 0; r < q; ++r)
    for (std::size_t c = 0; c < n; ++c) x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = data(r, c);
  const Eigen::MatrixXd centred = x.colwise() - x.rowwise().mean();
  const Eigen::MatrixXd cov = centred * centred.transpose() / static_cast<double>(n - 1);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);

  const std::size_t k = 4;
  const PcaResult pca = pca_reduce(data, k);
  for (std::size_t j = 0; j < k; ++j) {
    const auto e = static_cast<Eigen::Index>(q - 1 - j);  // eigenvalues ascend
    EXPECT_NEAR(pca.variances[j], eig.eigenvalues()(e), 1e-6);
    double dot_abs = 0.0;
    for (std::size_t r = 0; r < q; ++r) dot_abs += pca.basis(r, j) * eig.eigenvectors()(static_cast<Eigen::Index>(r), e);
    EXPECT_NEAR(std::abs(dot_abs), 1.0, 1e-6);
  }
}

TEST(Pca, ComponentsAreOrthonormal) {
  Rng rng(12);
  const PcaResult pca = pca_reduce(random_matrix(6, 15, rng), 5);
  const Matrix gram = matmul(pca.basis.transposed(), pca.basis);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j) EXPECT_NEAR(gram(i, j), i == j ? 1.0 : 0.0, 1e-9);
  for (std::size_t j = 1; j < 5; ++j) EXPECT_GE(pca.variances[j - 1], pca.variances[j] - 1e-12);
}

TEST(Pca, RecoversExactLowRankSubspace) {
  Rng rng(13);
  const Matrix basis = random_matrix(6, 2, rng);
  const Matrix coeff = random_matrix(2, 12, rng);
  Matrix data = matmul(basis, coeff);
  for (std::size_t c = 0; c < data.cols(); ++c)
    for (std::size_t r = 0; r < data.rows(); ++r) data(r, c) += 0.5 * static_cast<double>(r);
  const Matrix rec = pca_reconstruct(pca_reduce(data, 2));
  EXPECT_LT(testing::max_abs_diff(rec.values(), data.values()), 1e-9);
}

TEST(Pca, ReconstructionErrorIsNonIncreasingInDimension) {
  Rng rng(14);
  const Matrix data = random_matrix(6, 20, rng);
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k <= 6; ++k) {
    const Matrix rec = pca_reconstruct(pca_reduce(data, k));
    double err = 0.0;
    for (std::size_t i = 0; i < data.values().size(); ++i) err += std::pow(rec.values()[i] - data.values()[i], 2);
    EXPECT_LE(err, previous + 1e-12);
    previous = err;
  }
  EXPECT_LT(previous, 1e-10);
}

TEST(Pca, ReduceSemanticsAndErrors) {
  const ZslDataset ds = synth_generate(small_spec());
  const ZslDataset reduced = reduce_semantics(ds, 3);
  EXPECT_EQ(reduced.q, 3u);
  for (const ClassRecord& c : reduced.classes) EXPECT_EQ(c.semantic.size(), 3u);
  EXPECT_NO_THROW(reduced.validate());
  Rng rng(15);
  EXPECT_THROW(pca_reduce(random_matrix(4, 3, rng), 0), std::invalid_argument);
  EXPECT_THROW(pca_reduce(random_matrix(4, 3, rng), 4), std::invalid_argument);
}

TEST(Metrics, FormatsAndReadsBack) {
  Metrics m;
  m.set("top1_accuracy", 0.8125);
  m.set("images", std::size_t{40});
  m.set("k", -2);
  m.set("split", std::string("unseen"));
  m.set("neg_zero", -0.0000001);
  m.set("images", std::size_t{41});
  std::ostringstream out;
  m.write(out);
  EXPECT_EQ(out.str(), "top1_accuracy=0.812500\nimages=41\nk=-2\nsplit=unseen\nneg_zero=0.000000\n");
  std::istringstream in(out.str());
  const auto back = read_metrics(in);
  EXPECT_EQ(back.at("top1_accuracy"), "0.812500");
  EXPECT_EQ(back.size(), 5u);
  EXPECT_THROW(m.set("bad key", 1), std::invalid_argument);
  EXPECT_THROW(m.set("x", std::string("a\nb")), std::invalid_argument);
  std::istringstream junk("novalue\n");
  EXPECT_THROW(read_metrics(junk), std::runtime_error);
}

}  // namespace
}  // namespace s2ga
