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

// Semantics-guided attention layers and their stacking.
//
// One layer maps region features U (p x m) to attention probabilities over
// the m regions:
//
//   fused  = mean of the columns of U
//   mid    = relu(W_gs fused)                (q; trained towards the class semantics)
//   latent = relu(W_ga mid)                  (d)
//   local  = relu(W_ia U)                    (d x m)
//   H      = tanh(local (.) latent)          (each column scaled by latent)
//   probs  = softmax(w_p H + b_p)            (m)
//
// and then refines every region column i by the factor (1 + probs_i). Layers
// are applied in sequence; the image representation u_g is the column mean
// of the last refined matrix.

#ifndef S2GA_SGA_HPP
#define S2GA_SGA_HPP

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "s2ga/random.hpp"
#include "s2ga/tensor.hpp"

namespace s2ga {

struct SgaConfig {
  std::size_t p = 0;  // region feature dimension
  std::size_t m = 0;  // regions per image
  std::size_t q = 0;  // semantic dimension
  std::size_t d = 128;
  std::size_t k_layers = 2;

  void validate() const;
  friend bool operator==(const SgaConfig&, const SgaConfig&) = default;
};

/// Per-image region features; column i holds region i.
class RegionFeatures {
 public:
  RegionFeatures() = default;
  explicit RegionFeatures(Matrix features);

  std::size_t p() const { return features_.rows(); }
  std::size_t m() const { return features_.cols(); }
  const Matrix& features() const { return features_; }

  friend bool operator==(const RegionFeatures&, const RegionFeatures&) = default;

 private:
  Matrix features_;
};

struct SgaLayerParams {
  Matrix w_ia;  // d x p
  Matrix w_gs;  // q x p
  Matrix w_ga;  // d x q
  Matrix w_p;   // 1 x d
  double b_p = 0.0;

  static SgaLayerParams zeros(const SgaConfig& cfg);
  static SgaLayerParams glorot(const SgaConfig& cfg, Rng& rng);
  void check_shapes(const SgaConfig& cfg) const;
};

struct LayerTrace {
  Vector probs;       // attention over regions
  Matrix refined;     // U after this layer
  Vector guide_mid;   // relu(W_gs fused), compared against the class semantics
  Vector fused;       // column mean of this layer's input
};

struct AttentionTrace {
  std::vector<LayerTrace> layers;
};

namespace detail {
// Intermediates kept for the reverse pass.
struct LayerCache {
  Matrix input;
  Vector fused;
  Vector pre_mid;
  Vector mid;
  Vector pre_latent;
  Vector latent;
  Matrix pre_local;
  Matrix local;
  Matrix h;
  Vector probs;
};
}  // namespace detail

struct SgaForward {
  Vector u_g;
  std::size_t m = 0;
  AttentionTrace trace;
  std::vector<detail::LayerCache> cache;
};

struct SgaGradients {
  std::vector<SgaLayerParams> layers;
  Matrix d_features;  // gradient with respect to the input region features
};

Vector fuse_regions(const Matrix& u);
Matrix local_embed(const Matrix& u, const Matrix& w_ia);

struct GuideOutput {
  Vector latent;
  Vector mid;
};
GuideOutput semantic_guide(const Vector& v_g, const Matrix& w_gs, const Matrix& w_ga);

struct AttentionOutput {
  Vector probs;
  Vector mid;
};
AttentionOutput attention_probs(const Matrix& u, const Vector& v_g, const SgaLayerParams& params);

Matrix refine_regions(const Matrix& u, const Vector& probs);

SgaForward sga_forward(const RegionFeatures& v, const SgaConfig& cfg,
                       std::span<const SgaLayerParams> layers);

/// Squared L2 distance between the guide mid-layer output and the semantics.
double guide_loss(const Vector& mid, const Vector& s);

/// Reverse pass of sga_forward. `d_ug` is the upstream gradient on u_g and
/// `guide_weights[k]` the upstream weight on layer k's guide loss against `s`.
SgaGradients sga_backward(const SgaForward& forward, std::span<const SgaLayerParams> layers,
                          const Vector& d_ug, const Vector& s,
                          std::span<const double> guide_weights);

}  // namespace s2ga

#endif  // S2GA_SGA_HPP
