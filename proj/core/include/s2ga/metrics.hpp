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

// Flat `key=value` metrics records, one per line, in insertion order.
// Reals are written with fixed six-decimal formatting.

#ifndef S2GA_METRICS_HPP
#define S2GA_METRICS_HPP

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace s2ga {

class Metrics {
 public:
  void set(const std::string& key, double value);
  void set(const std::string& key, std::size_t value);
  void set(const std::string& key, int value);
  void set(const std::string& key, const std::string& value);

  const std::vector<std::pair<std::string, std::string>>& records() const { return records_; }

  void write(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;

 private:
  void put(const std::string& key, std::string value);
  std::vector<std::pair<std::string, std::string>> records_;
};

std::string format_fixed6(double v);

/// Parses a metrics file; throws std::runtime_error on a malformed line.
std::map<std::string, std::string> read_metrics(std::istream& in);
std::map<std::string, std::string> load_metrics(const std::filesystem::path& path);

}  // namespace s2ga

#endif  // S2GA_METRICS_HPP
