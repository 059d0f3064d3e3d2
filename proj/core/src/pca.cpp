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

#include "s2ga/pca.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "s2ga/random.hpp"

namespace s2ga {

namespace {

constexpr int kMaxIterations = 50000;
constexpr double kTolerance = 1e-13;

void orthogonalize(Vector& v, const std::vector<Vector>& basis) {
  // Two passes of classical Gram-Schmidt keep the basis orthonormal to ~1e-15.
  for (int pass = 0; pass < 2; ++pass) {
    for (const Vector& b : basis) axpy(-dot(v, b), b, v);
  }
}

bool normalize(Vector& v) {
  const double n = norm(v);
  if (!(n > 1e-300)) return false;
  for (double& x : v.values()) x /= n;
  return true;
}

void fix_sign(Vector& v) {
  std::size_t arg = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[arg])) arg = i;
  if (v[arg] < 0.0)
    for (double& x : v.values()) x = -x;
}

}  // namespace

PcaResult pca_reduce(const Matrix& vectors, std::size_t target_dim) {
  const std::size_t q = vectors.rows();
  const std::size_t n = vectors.cols();
  if (target_dim == 0 || target_dim > std::min(q, n)) {
    throw std::invalid_argument("pca_reduce: target_dim " + std::to_string(target_dim) +
                                " must be in [1, min(q, C)] = [1, " +
                                std::to_string(std::min(q, n)) + "]");
  }

  PcaResult out;
  out.mean = Vector(q);
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t r = 0; r < q; ++r) out.mean[r] += vectors(r, c);
  out.mean = scale(out.mean, 1.0 / static_cast<double>(n));

  Matrix centred(q, n);
  for (std::size_t r = 0; r < q; ++r)
    for (std::size_t c = 0; c < n; ++c) centred(r, c) = vectors(r, c) - out.mean[r];

  Matrix cov = matmul(centred, centred.transposed());
  const double denom = static_cast<double>(std::max<std::size_t>(n, 2) - 1);
  for (double& v : cov.values()) v /= denom;

  double trace = 0.0;
  for (std::size_t i = 0; i < q; ++i) trace += cov(i, i);

  std::vector<Vector> components;
  out.variances = Vector(target_dim);
  Rng rng(0x5eed);
  for (std::size_t k = 0; k < target_dim; ++k) {
    Vector v(q);
    fill_normal(v.values(), rng);
    orthogonalize(v, components);
    normalize(v);
    for (int it = 0; it < kMaxIterations; ++it) {
      Vector w = matvec(cov, v);
      orthogonalize(w, components);
      // Remaining spectrum is numerically zero: any orthonormal direction will do.
      if (norm(w) <= 1e-14 * std::max(trace, 1e-300)) break;
      normalize(w);
      const double delta = std::sqrt(squared_distance(w, v));
      v = std::move(w);
      if (delta < kTolerance) break;
    }
    fix_sign(v);
    out.variances[k] = std::max(0.0, dot(v, matvec(cov, v)));
    components.push_back(std::move(v));
  }

  out.basis = Matrix::from_columns(components);
  out.reduced = matmul(out.basis.transposed(), centred);
  return out;
}

Matrix pca_reconstruct(const PcaResult& pca) {
  Matrix rec = matmul(pca.basis, pca.reduced);
  for (std::size_t r = 0; r < rec.rows(); ++r)
    for (std::size_t c = 0; c < rec.cols(); ++c) rec(r, c) += pca.mean[r];
  return rec;
}

ZslDataset reduce_semantics(const ZslDataset& ds, std::size_t target_dim) {
  Matrix sem(ds.q, ds.classes.size());
  for (std::size_t c = 0; c < ds.classes.size(); ++c) sem.set_col(c, ds.classes[c].semantic);
  const PcaResult pca = pca_reduce(sem, target_dim);
  ZslDataset out = ds;
  out.q = target_dim;
  for (std::size_t c = 0; c < out.classes.size(); ++c) out.classes[c].semantic = pca.reduced.col(c);
  return out;
}

}  // namespace s2ga
