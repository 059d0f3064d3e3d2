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

#ifndef S2GA_TENSOR_HPP
#define S2GA_TENSOR_HPP

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace s2ga {

/// Thrown when operand shapes do not agree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Dense real vector (double precision).
class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t len, double fill = 0.0) : data_(len, fill) {}
  explicit Vector(std::vector<double> data) : data_(std::move(data)) {}
  Vector(std::initializer_list<double> values) : data_(values) {}

  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  const std::vector<double>& raw() const { return data_; }

  friend bool operator==(const Vector&, const Vector&) = default;

 private:
  std::vector<double> data_;
};

/// Dense row-major real matrix (double precision).
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Matrix identity(std::size_t n);
  /// Builds a matrix whose columns are the given vectors (all of equal length).
  static Matrix from_columns(std::span<const Vector> columns);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  Vector col(std::size_t c) const;
  void set_col(std::size_t c, const Vector& v);
  Matrix transposed() const;

  std::string shape_string() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Products.
Matrix matmul(const Matrix& a, const Matrix& b);
Vector matvec(const Matrix& a, const Vector& x);
/// aᵀ x without forming the transpose.
Vector matvec_t(const Matrix& a, const Vector& x);
/// a += alpha · x yᵀ
void add_outer(Matrix& a, const Vector& x, const Vector& y, double alpha = 1.0);

// Elementwise maps.
Vector relu(const Vector& x);
Matrix relu(const Matrix& x);
Matrix tanh_map(const Matrix& x);
Vector softmax(const Vector& z);

/// Column j of the result is the elementwise product of column j of m with v.
Matrix col_broadcast_mul(const Matrix& m, const Vector& v);

// Small vector algebra.
double dot(const Vector& a, const Vector& b);
double squared_distance(const Vector& a, const Vector& b);
double norm(const Vector& a);
Vector add(const Vector& a, const Vector& b);
Vector sub(const Vector& a, const Vector& b);
Vector scale(const Vector& a, double s);
void axpy(double alpha, const Vector& x, Vector& y);
void axpy(double alpha, const Matrix& x, Matrix& y);

bool all_finite(std::span<const double> values);

using ScalarFunction = std::function<double(std::span<const double>)>;

/// Central finite-difference gradient of f at x. Throws std::domain_error if
/// any evaluation of f is non-finite.
Vector finite_diff_grad(const ScalarFunction& f, const Vector& x, double eps = 1e-6);

}  // namespace s2ga

#endif  // S2GA_TENSOR_HPP
