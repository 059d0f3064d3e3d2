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

// Visual-semantic matching head.
//
// Class semantics s are embedded into the visual space as relu(W_e s + b_e).
// An image representation u_g is scored against every seen class by the dot
// product with that class's embedding, and the alignment loss pulls u_g
// towards the embedding of its own class.

#ifndef S2GA_MATCHER_HPP
#define S2GA_MATCHER_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "s2ga/random.hpp"
#include "s2ga/tensor.hpp"

namespace s2ga {

struct MatcherParams {
  Matrix w_e;  // p x q
  Vector b_e;  // p

  static MatcherParams zeros(std::size_t p, std::size_t q);
  static MatcherParams glorot(std::size_t p, std::size_t q, Rng& rng);
  void check_shapes(std::size_t p, std::size_t q) const;
};

/// Column c of `semantics` is the semantic vector of class `labels[c]`.
class ClassSemanticTable {
 public:
  ClassSemanticTable() = default;
  ClassSemanticTable(Matrix semantics, std::vector<int> labels);

  std::size_t size() const { return labels_.size(); }
  std::size_t dim() const { return semantics_.rows(); }
  const Matrix& semantics() const { return semantics_; }
  const std::vector<int>& labels() const { return labels_; }
  Vector semantic(std::size_t c) const { return semantics_.col(c); }
  std::optional<std::size_t> index_of(int label) const;

 private:
  Matrix semantics_;
  std::vector<int> labels_;
};

struct LossWeights {
  double align = 1.0;
  double guide = 1.0;
};

struct LossBreakdown {
  double classify = 0.0;
  double align = 0.0;
  double guide = 0.0;  // summed over attention layers
  double total = 0.0;
  LossWeights weights;
};

Vector embed_semantic(const Vector& s, const MatcherParams& params);
Matrix embed_all(const ClassSemanticTable& table, const MatcherParams& params);
double align_loss(const Vector& v_s, const Vector& u_g);
/// softmax over the scores dot(column c of v_s_all, u_g).
Vector class_probs(const Vector& u_g, const Matrix& v_s_all);
/// -log(probs[true_class]) with the probability clamped at 1e-300.
double classify_loss(const Vector& probs, std::size_t true_class);

/// Batch state of the matching head, retained for matcher_backward.
struct MatcherForward {
  Matrix pre_embed;  // W_e S + b_e, p x C
  Matrix embedded;   // relu(pre_embed)
  std::vector<Vector> u_g;
  std::vector<Vector> probs;
  std::vector<std::size_t> targets;
  LossWeights weights;
  double classify_mean = 0.0;
  double align_mean = 0.0;
};

MatcherForward matcher_forward(const ClassSemanticTable& table, const MatcherParams& params,
                               std::span<const Vector> u_g, std::span<const std::size_t> targets,
                               LossWeights weights);

struct MatcherGradients {
  MatcherParams params;
  std::vector<Vector> d_ug;  // one per batch element
};

/// Gradients of mean(classify + weights.align * align) over the batch.
MatcherGradients matcher_backward(const MatcherForward& forward, const ClassSemanticTable& table);

}  // namespace s2ga

#endif  // S2GA_MATCHER_HPP
