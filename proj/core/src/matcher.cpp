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

#include "s2ga/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

namespace s2ga {

MatcherParams MatcherParams::zeros(std::size_t p, std::size_t q) {
  return {Matrix(p, q), Vector(p)};
}

MatcherParams MatcherParams::glorot(std::size_t p, std::size_t q, Rng& rng) {
  MatcherParams m = zeros(p, q);
  glorot_uniform(m.w_e, rng);
  return m;
}

void MatcherParams::check_shapes(std::size_t p, std::size_t q) const {
  if (w_e.rows() != p || w_e.cols() != q || b_e.size() != p) {
    throw DimensionError("MatcherParams: w_e " + w_e.shape_string() + ", b_e [" +
                         std::to_string(b_e.size()) + "], expected p=" + std::to_string(p) +
                         " q=" + std::to_string(q));
  }
}

ClassSemanticTable::ClassSemanticTable(Matrix semantics, std::vector<int> labels)
    : semantics_(std::move(semantics)), labels_(std::move(labels)) {
  if (semantics_.cols() != labels_.size()) {
    throw DimensionError("ClassSemanticTable: " + std::to_string(labels_.size()) +
                         " labels for " + semantics_.shape_string() + " semantics");
  }
  std::set<int> seen;
  for (int l : labels_) {
    if (!seen.insert(l).second) {
      throw std::invalid_argument("ClassSemanticTable: duplicate class id " + std::to_string(l));
    }
  }
  if (!all_finite(semantics_.values())) {
    throw std::invalid_argument("ClassSemanticTable: non-finite semantic entry");
  }
}

std::optional<std::size_t> ClassSemanticTable::index_of(int label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - labels_.begin());
}

Vector embed_semantic(const Vector& s, const MatcherParams& params) {
  Vector pre = matvec(params.w_e, s);
  axpy(1.0, params.b_e, pre);
  return relu(pre);
}

namespace {

Matrix pre_embed_all(const ClassSemanticTable& table, const MatcherParams& params) {
  Matrix pre = matmul(params.w_e, table.semantics());
  if (params.b_e.size() != pre.rows()) {
    throw DimensionError("embed_all: b_e length does not match w_e rows");
  }
  for (std::size_t r = 0; r < pre.rows(); ++r)
    for (std::size_t c = 0; c < pre.cols(); ++c) pre(r, c) += params.b_e[r];
  return pre;
}

}  // namespace

Matrix embed_all(const ClassSemanticTable& table, const MatcherParams& params) {
  return relu(pre_embed_all(table, params));
}

double align_loss(const Vector& v_s, const Vector& u_g) { return squared_distance(v_s, u_g); }

Vector class_probs(const Vector& u_g, const Matrix& v_s_all) {
  return softmax(matvec_t(v_s_all, u_g));
}

double classify_loss(const Vector& probs, std::size_t true_class) {
  if (true_class >= probs.size()) {
    throw std::out_of_range("classify_loss: class index " + std::to_string(true_class) +
                            " out of range for " + std::to_string(probs.size()) + " classes");
  }
  return -std::log(std::max(probs[true_class], 1e-300));
}

MatcherForward matcher_forward(const ClassSemanticTable& table, const MatcherParams& params,
                               std::span<const Vector> u_g, std::span<const std::size_t> targets,
                               LossWeights weights) {
  if (u_g.size() != targets.size()) {
    throw std::invalid_argument("matcher_forward: representation/target count mismatch");
  }
  if (u_g.empty()) throw std::invalid_argument("matcher_forward: empty batch");
  MatcherForward f;
  f.pre_embed = pre_embed_all(table, params);
  f.embedded = relu(f.pre_embed);
  f.weights = weights;
  f.u_g.assign(u_g.begin(), u_g.end());
  f.targets.assign(targets.begin(), targets.end());
  f.probs.reserve(u_g.size());
  double classify = 0.0;
  double align = 0.0;
  for (std::size_t b = 0; b < u_g.size(); ++b) {
    f.probs.push_back(class_probs(u_g[b], f.embedded));
    classify += classify_loss(f.probs.back(), targets[b]);
    align += align_loss(f.embedded.col(targets[b]), u_g[b]);
  }
  const double inv = 1.0 / static_cast<double>(u_g.size());
  f.classify_mean = classify * inv;
  f.align_mean = align * inv;
  return f;
}

MatcherGradients matcher_backward(const MatcherForward& forward, const ClassSemanticTable& table) {
  const std::size_t batch = forward.u_g.size();
  if (batch == 0 || forward.probs.size() != batch) {
    throw std::invalid_argument("matcher_backward: missing forward state");
  }
  const std::size_t p = forward.embedded.rows();
  const std::size_t classes = forward.embedded.cols();
  const double inv = 1.0 / static_cast<double>(batch);

  Matrix d_embedded(p, classes);
  MatcherGradients g;
  g.d_ug.reserve(batch);
  for (std::size_t b = 0; b < batch; ++b) {
    const Vector& u = forward.u_g[b];
    const std::size_t t = forward.targets[b];
    Vector d_u(p);
    // cross-entropy on dot-product scores
    for (std::size_t c = 0; c < classes; ++c) {
      const double d_score = (forward.probs[b][c] - (c == t ? 1.0 : 0.0)) * inv;
      if (d_score == 0.0) continue;
      for (std::size_t r = 0; r < p; ++r) {
        d_embedded(r, c) += d_score * u[r];
        d_u[r] += d_score * forward.embedded(r, c);
      }
    }
    if (forward.weights.align != 0.0) {
      const double w = 2.0 * forward.weights.align * inv;
      for (std::size_t r = 0; r < p; ++r) {
        const double diff = forward.embedded(r, t) - u[r];
        d_embedded(r, t) += w * diff;
        d_u[r] -= w * diff;
      }
    }
    g.d_ug.push_back(std::move(d_u));
  }

  Matrix d_pre(p, classes);
  for (std::size_t r = 0; r < p; ++r)
    for (std::size_t c = 0; c < classes; ++c)
      d_pre(r, c) = forward.pre_embed(r, c) > 0.0 ? d_embedded(r, c) : 0.0;

  g.params.w_e = matmul(d_pre, table.semantics().transposed());
  g.params.b_e = Vector(p);
  for (std::size_t r = 0; r < p; ++r)
    for (std::size_t c = 0; c < classes; ++c) g.params.b_e[r] += d_pre(r, c);
  return g;
}

}  // namespace s2ga
