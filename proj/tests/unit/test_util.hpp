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

#ifndef S2GA_TESTS_TEST_UTIL_HPP
#define S2GA_TESTS_TEST_UTIL_HPP

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>

#include "s2ga/random.hpp"
#include "s2ga/sga.hpp"
#include "s2ga/tensor.hpp"

namespace s2ga::testing {

inline Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng, double lo = -1.0,
                            double hi = 1.0) {
  Matrix m(rows, cols);
  fill_uniform(m.values(), rng, lo, hi);
  return m;
}

inline Vector random_vector(std::size_t n, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Vector v(n);
  fill_uniform(v.values(), rng, lo, hi);
  return v;
}

inline RegionFeatures random_regions(std::size_t p, std::size_t m, Rng& rng) {
  return RegionFeatures(random_matrix(p, m, rng, -1.0, 1.0));
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("s2ga_" + tag + "_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace s2ga::testing

#endif  // S2GA_TESTS_TEST_UTIL_HPP
