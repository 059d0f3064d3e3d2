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

#include "s2ga/sga.hpp"

#include <string>

namespace s2ga {

namespace {

void expect_shape(const Matrix& m, std::size_t rows, std::size_t cols, const char* name) {
  if (m.rows() != rows || m.cols() != cols) {
    throw DimensionError(std::string("SgaLayerParams: ") + name + " is " + m.shape_string() +
                         ", expected " + std::to_string(rows) + "x" + std::to_string(cols));
  }
}

Vector attention_logits(const Matrix& h, const SgaLayerParams& params) {
  if (params.w_p.rows() != 1 || params.w_p.cols() != h.rows()) {
    throw DimensionError("attention_logits: w_p " + params.w_p.shape_string() + " vs h " +
                         h.shape_string());
  }
  Vector logits(h.cols(), params.b_p);
  for (std::size_t j = 0; j < h.rows(); ++j) {
    const double w = params.w_p(0, j);
    for (std::size_t i = 0; i < h.cols(); ++i) logits[i] += w * h(j, i);
  }
  return logits;
}

detail::LayerCache run_layer(const Matrix& u, const SgaLayerParams& params) {
  detail::LayerCache c;
  c.input = u;
  c.fused = fuse_regions(u);
  c.pre_mid = matvec(params.w_gs, c.fused);
  c.mid = relu(c.pre_mid);
  c.pre_latent = matvec(params.w_ga, c.mid);
  c.latent = relu(c.pre_latent);
  c.pre_local = matmul(params.w_ia, u);
  c.local = relu(c.pre_local);
  c.h = tanh_map(col_broadcast_mul(c.local, c.latent));
  c.probs = softmax(attention_logits(c.h, params));
  return c;
}

}  // namespace

void SgaConfig::validate() const {
  if (p == 0 || m == 0 || q == 0 || d == 0) {
    throw std::invalid_argument("SgaConfig: p, m, q and d must all be >= 1");
  }
}

RegionFeatures::RegionFeatures(Matrix features) : features_(std::move(features)) {
  if (features_.rows() == 0 || features_.cols() == 0) {
    throw DimensionError("RegionFeatures: need p >= 1 and m >= 1, got " +
                         features_.shape_string());
  }
  if (!all_finite(features_.values())) {
    throw std::invalid_argument("RegionFeatures: non-finite entry");
  }
}

SgaLayerParams SgaLayerParams::zeros(const SgaConfig& cfg) {
  SgaLayerParams l;
  l.w_ia = Matrix(cfg.d, cfg.p);
  l.w_gs = Matrix(cfg.q, cfg.p);
  l.w_ga = Matrix(cfg.d, cfg.q);
  l.w_p = Matrix(1, cfg.d);
  l.b_p = 0.0;
  return l;
}

SgaLayerParams SgaLayerParams::glorot(const SgaConfig& cfg, Rng& rng) {
  SgaLayerParams l = zeros(cfg);
  glorot_uniform(l.w_ia, rng);
  glorot_uniform(l.w_gs, rng);
  glorot_uniform(l.w_ga, rng);
  glorot_uniform(l.w_p, rng);
  return l;
}

void SgaLayerParams::check_shapes(const SgaConfig& cfg) const {
  expect_shape(w_ia, cfg.d, cfg.p, "w_ia");
  expect_shape(w_gs, cfg.q, cfg.p, "w_gs");
  expect_shape(w_ga, cfg.d, cfg.q, "w_ga");
  expect_shape(w_p, 1, cfg.d, "w_p");
}

Vector fuse_regions(const Matrix& u) {
  Vector out(u.rows());
  if (u.cols() == 0) return out;
  const double inv = 1.0 / static_cast<double>(u.cols());
  for (std::size_t r = 0; r < u.rows(); ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < u.cols(); ++c) acc += u(r, c);
    out[r] = acc * inv;
  }
  return out;
}

Matrix local_embed(const Matrix& u, const Matrix& w_ia) { return relu(matmul(w_ia, u)); }

GuideOutput semantic_guide(const Vector& v_g, const Matrix& w_gs, const Matrix& w_ga) {
  GuideOutput out;
  out.mid = relu(matvec(w_gs, v_g));
  out.latent = relu(matvec(w_ga, out.mid));
  return out;
}

AttentionOutput attention_probs(const Matrix& u, const Vector& v_g, const SgaLayerParams& params) {
  const Matrix local = local_embed(u, params.w_ia);
  GuideOutput guide = semantic_guide(v_g, params.w_gs, params.w_ga);
  const Matrix h = tanh_map(col_broadcast_mul(local, guide.latent));
  return {softmax(attention_logits(h, params)), std::move(guide.mid)};
}

Matrix refine_regions(const Matrix& u, const Vector& probs) {
  if (probs.size() != u.cols()) {
    throw DimensionError("refine_regions: " + u.shape_string() + " with " +
                         std::to_string(probs.size()) + " weights");
  }
  Matrix out(u.rows(), u.cols());
  for (std::size_t r = 0; r < u.rows(); ++r)
    for (std::size_t c = 0; c < u.cols(); ++c) out(r, c) = u(r, c) + probs[c] * u(r, c);
  return out;
}

SgaForward sga_forward(const RegionFeatures& v, const SgaConfig& cfg,
                       std::span<const SgaLayerParams> layers) {
  if (layers.size() != cfg.k_layers) {
    throw std::invalid_argument("sga_forward: expected " + std::to_string(cfg.k_layers) +
                                " layers, got " + std::to_string(layers.size()));
  }
  if (v.p() != cfg.p) {
    throw DimensionError("sga_forward: region dimension " + std::to_string(v.p()) +
                         " does not match configured p=" + std::to_string(cfg.p));
  }
  if (v.m() != cfg.m) {
    throw DimensionError("sga_forward: region count " + std::to_string(v.m()) +
                         " does not match configured m=" + std::to_string(cfg.m));
  }
  SgaForward fwd;
  fwd.m = v.m();
  fwd.cache.reserve(layers.size());
  fwd.trace.layers.reserve(layers.size());
  Matrix u = v.features();
  for (const SgaLayerParams& params : layers) {
    params.check_shapes(cfg);
    detail::LayerCache c = run_layer(u, params);
    u = refine_regions(u, c.probs);
    fwd.trace.layers.push_back({c.probs, u, c.mid, c.fused});
    fwd.cache.push_back(std::move(c));
  }
  fwd.u_g = fuse_regions(u);
  return fwd;
}

double guide_loss(const Vector& mid, const Vector& s) {
  if (mid.size() != s.size()) {
    throw DimensionError("guide_loss: length " + std::to_string(mid.size()) + " vs " +
                         std::to_string(s.size()));
  }
  return squared_distance(mid, s);
}

SgaGradients sga_backward(const SgaForward& forward, std::span<const SgaLayerParams> layers,
                          const Vector& d_ug, const Vector& s,
                          std::span<const double> guide_weights) {
  const std::size_t k_layers = layers.size();
  if (forward.m == 0) throw std::invalid_argument("sga_backward: missing forward trace");
  if (forward.cache.size() != k_layers || forward.trace.layers.size() != k_layers) {
    throw std::invalid_argument("sga_backward: forward trace missing or from a different stack");
  }
  if (guide_weights.size() != k_layers) {
    throw std::invalid_argument("sga_backward: need one guide weight per layer");
  }
  const std::size_t p = forward.u_g.size();
  if (d_ug.size() != p) throw DimensionError("sga_backward: d_ug has wrong length");

  SgaGradients grads;
  grads.layers.reserve(k_layers);
  for (const SgaLayerParams& l : layers) {
    SgaLayerParams g;
    g.w_ia = Matrix(l.w_ia.rows(), l.w_ia.cols());
    g.w_gs = Matrix(l.w_gs.rows(), l.w_gs.cols());
    g.w_ga = Matrix(l.w_ga.rows(), l.w_ga.cols());
    g.w_p = Matrix(1, l.w_p.cols());
    grads.layers.push_back(std::move(g));
  }

  // u_g is the column mean of the final refined matrix.
  const std::size_t m = forward.m;
  const double inv_m = 1.0 / static_cast<double>(m);
  Matrix d_u(p, m);
  for (std::size_t r = 0; r < p; ++r)
    for (std::size_t c = 0; c < m; ++c) d_u(r, c) = d_ug[r] * inv_m;

  for (std::size_t k = k_layers; k-- > 0;) {
    const detail::LayerCache& c = forward.cache[k];
    const SgaLayerParams& params = layers[k];
    SgaLayerParams& g = grads.layers[k];
    const std::size_t d = c.h.rows();

    // refined = input * diag(1 + probs)
    Vector d_probs(m);
    Matrix d_in(p, m);
    for (std::size_t r = 0; r < p; ++r) {
      for (std::size_t i = 0; i < m; ++i) {
        d_probs[i] += d_u(r, i) * c.input(r, i);
        d_in(r, i) = d_u(r, i) * (1.0 + c.probs[i]);
      }
    }

    // softmax Jacobian
    const double mean_dp = dot(c.probs, d_probs);
    Vector d_logits(m);
    for (std::size_t i = 0; i < m; ++i) d_logits[i] = c.probs[i] * (d_probs[i] - mean_dp);

    double d_bp = 0.0;
    for (std::size_t i = 0; i < m; ++i) d_bp += d_logits[i];
    g.b_p += d_bp;

    Matrix d_local(d, m);
    Vector d_latent(d);
    for (std::size_t j = 0; j < d; ++j) {
      const double wp = params.w_p(0, j);
      double acc_wp = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const double hji = c.h(j, i);
        acc_wp += d_logits[i] * hji;
        const double dz = wp * d_logits[i] * (1.0 - hji * hji);
        d_local(j, i) = dz * c.latent[j];
        d_latent[j] += dz * c.local(j, i);
      }
      g.w_p(0, j) += acc_wp;
    }

    // local = relu(W_ia U)
    Matrix d_pre_local(d, m);
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t i = 0; i < m; ++i)
        d_pre_local(j, i) = c.pre_local(j, i) > 0.0 ? d_local(j, i) : 0.0;
    axpy(1.0, matmul(d_pre_local, c.input.transposed()), g.w_ia);
    axpy(1.0, matmul(params.w_ia.transposed(), d_pre_local), d_in);

    // latent = relu(W_ga mid)
    Vector d_pre_latent(d);
    for (std::size_t j = 0; j < d; ++j) d_pre_latent[j] = c.pre_latent[j] > 0.0 ? d_latent[j] : 0.0;
    add_outer(g.w_ga, d_pre_latent, c.mid);
    Vector d_mid = matvec_t(params.w_ga, d_pre_latent);

    // guide loss on mid
    if (guide_weights[k] != 0.0) {
      if (s.size() != c.mid.size()) throw DimensionError("sga_backward: semantic length mismatch");
      for (std::size_t t = 0; t < s.size(); ++t) d_mid[t] += guide_weights[k] * 2.0 * (c.mid[t] - s[t]);
    }

    // mid = relu(W_gs fused)
    Vector d_pre_mid(d_mid.size());
    for (std::size_t t = 0; t < d_mid.size(); ++t) d_pre_mid[t] = c.pre_mid[t] > 0.0 ? d_mid[t] : 0.0;
    add_outer(g.w_gs, d_pre_mid, c.fused);
    const Vector d_fused = matvec_t(params.w_gs, d_pre_mid);

    // fused = column mean of input
    for (std::size_t r = 0; r < p; ++r) {
      const double share = d_fused[r] * inv_m;
      for (std::size_t i = 0; i < m; ++i) d_in(r, i) += share;
    }
    d_u = std::move(d_in);
  }
  grads.d_features = std::move(d_u);
  return grads;
}

}  // namespace s2ga
