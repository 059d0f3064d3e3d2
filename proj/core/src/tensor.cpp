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

#include "s2ga/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace s2ga {

namespace {

std::string shape_of(const Matrix& m) { return m.shape_string(); }
std::string shape_of(const Vector& v) { return "[" + std::to_string(v.size()) + "]"; }

template <typename A, typename B>
[[noreturn]] void mismatch(const char* op, const A& a, const B& b) {
  throw DimensionError(std::string(op) + ": shape mismatch " + shape_of(a) + " vs " +
                       shape_of(b));
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw DimensionError("Matrix: data length " + std::to_string(data_.size()) +
                         " does not match " + shape_string());
  }
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<double> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw DimensionError("Matrix::from_rows: ragged rows");
    data.insert(data.end(), row.begin(), row.end());
  }
  return Matrix(r, c, std::move(data));
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_columns(std::span<const Vector> columns) {
  if (columns.empty()) return Matrix();
  const std::size_t r = columns.front().size();
  Matrix m(r, columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j].size() != r) mismatch("Matrix::from_columns", columns.front(), columns[j]);
    m.set_col(j, columns[j]);
  }
  return m;
}

Vector Matrix::col(std::size_t c) const {
  Vector v(rows_);
  for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
  return v;
}

void Matrix::set_col(std::size_t c, const Vector& v) {
  if (v.size() != rows_) mismatch("Matrix::set_col", *this, v);
  for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = v[r];
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

std::string Matrix::shape_string() const {
  return std::to_string(rows_) + "x" + std::to_string(cols_);
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) mismatch("matmul", a, b);
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

Vector matvec(const Matrix& a, const Vector& x) {
  if (a.cols() != x.size()) mismatch("matvec", a, x);
  Vector y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * x[k];
    y[i] = acc;
  }
  return y;
}

Vector matvec_t(const Matrix& a, const Vector& x) {
  if (a.rows() != x.size()) mismatch("matvec_t", a, x);
  Vector y(a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    for (std::size_t k = 0; k < a.cols(); ++k) y[k] += a(i, k) * xi;
  }
  return y;
}

void add_outer(Matrix& a, const Vector& x, const Vector& y, double alpha) {
  if (a.rows() != x.size() || a.cols() != y.size()) mismatch("add_outer", a, x);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double s = alpha * x[i];
    if (s == 0.0) continue;
    for (std::size_t j = 0; j < y.size(); ++j) a(i, j) += s * y[j];
  }
}

Vector relu(const Vector& x) {
  Vector y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
  return y;
}

Matrix relu(const Matrix& x) {
  Matrix y(x.rows(), x.cols());
  auto in = x.values();
  auto out = y.values();
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] > 0.0 ? in[i] : 0.0;
  return y;
}

Matrix tanh_map(const Matrix& x) {
  Matrix y(x.rows(), x.cols());
  auto in = x.values();
  auto out = y.values();
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = std::tanh(in[i]);
  return y;
}

Vector softmax(const Vector& z) {
  if (z.empty()) throw DimensionError("softmax: empty input");
  const double shift = *std::max_element(z.values().begin(), z.values().end());
  Vector out(z.size());
  double total = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    out[i] = std::exp(z[i] - shift);
    total += out[i];
  }
  for (std::size_t i = 0; i < z.size(); ++i) out[i] /= total;
  return out;
}

Matrix col_broadcast_mul(const Matrix& m, const Vector& v) {
  if (m.rows() != v.size()) mismatch("col_broadcast_mul", m, v);
  Matrix out(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) out(r, c) = m(r, c) * v[r];
  return out;
}

double dot(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) mismatch("dot", a, b);
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double squared_distance(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) mismatch("squared_distance", a, b);
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

double norm(const Vector& a) { return std::sqrt(dot(a, a)); }

Vector add(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) mismatch("add", a, b);
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

Vector sub(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) mismatch("sub", a, b);
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

Vector scale(const Vector& a, double s) {
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * s;
  return out;
}

void axpy(double alpha, const Vector& x, Vector& y) {
  if (x.size() != y.size()) mismatch("axpy", x, y);
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void axpy(double alpha, const Matrix& x, Matrix& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) mismatch("axpy", x, y);
  auto in = x.values();
  auto out = y.values();
  for (std::size_t i = 0; i < in.size(); ++i) out[i] += alpha * in[i];
}

bool all_finite(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

Vector finite_diff_grad(const ScalarFunction& f, const Vector& x, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("finite_diff_grad: eps must be positive");
  std::vector<double> probe(x.values().begin(), x.values().end());
  Vector grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = probe[i];
    probe[i] = saved + eps;
    const double up = f(probe);
    probe[i] = saved - eps;
    const double down = f(probe);
    probe[i] = saved;
    if (!std::isfinite(up) || !std::isfinite(down)) {
      std::ostringstream msg;
      msg << "finite_diff_grad: non-finite function value at coordinate " << i;
      throw std::domain_error(msg.str());
    }
    grad[i] = (up - down) / (2.0 * eps);
  }
  return grad;
}

}  // namespace s2ga
