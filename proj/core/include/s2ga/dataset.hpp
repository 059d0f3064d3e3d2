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

// Zero-shot dataset model and its text file format.
//
//   ZSLDS v1 p=<p> m=<m> q=<q>
//   CLASS <id> <parent-id> <q comma-separated reals>
//   IMAGE <id> <class-id> <m*p comma-separated reals, region-major>
//   SPLIT SEEN <ids...>
//   SPLIT UNSEEN <ids...>
//
// A parent id of -1 means "no parent category". Reals are written with 9
// significant digits; classes, images and split ids are written sorted by id
// so repeated saves are byte-identical.

#ifndef S2GA_DATASET_HPP
#define S2GA_DATASET_HPP

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "s2ga/matcher.hpp"
#include "s2ga/sga.hpp"

namespace s2ga {

inline constexpr int kNoParent = -1;

struct ClassRecord {
  int id = 0;
  int parent = kNoParent;
  Vector semantic;
};

struct ImageRecord {
  int id = 0;
  int class_id = 0;
  RegionFeatures regions;
};

struct ZslDataset {
  std::size_t p = 0;
  std::size_t m = 0;
  std::size_t q = 0;
  std::vector<ClassRecord> classes;
  std::vector<ImageRecord> images;
  std::vector<int> seen;
  std::vector<int> unseen;

  /// Throws std::invalid_argument naming the first violated invariant.
  void validate() const;
  /// Sorts classes, images and split ids by id.
  void canonicalize();

  const ClassRecord& class_by_id(int id) const;
  ClassSemanticTable table(std::span<const int> class_ids) const;
  std::vector<const ImageRecord*> images_of(std::span<const int> class_ids) const;
};

/// Parse failure carrying the 1-based line number it refers to.
class DatasetFormatError : public std::runtime_error {
 public:
  DatasetFormatError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

ZslDataset read_dataset(std::istream& in);
ZslDataset load_dataset(const std::filesystem::path& path);
void write_dataset(const ZslDataset& ds, std::ostream& out);
void save_dataset(const ZslDataset& ds, const std::filesystem::path& path);

/// Formats a real with 9 significant digits.
std::string format_real9(double v);

}  // namespace s2ga

#endif  // S2GA_DATASET_HPP
