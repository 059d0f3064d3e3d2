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

#include "s2ga/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace s2ga {

std::string format_fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  std::string s(buf);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

void Metrics::put(const std::string& key, std::string value) {
  if (key.empty() || key.find_first_of("=\n \t") != std::string::npos) {
    throw std::invalid_argument("Metrics: invalid key '" + key + "'");
  }
  auto it = std::find_if(records_.begin(), records_.end(),
                         [&](const auto& kv) { return kv.first == key; });
  if (it != records_.end()) {
    it->second = std::move(value);
  } else {
    records_.emplace_back(key, std::move(value));
  }
}

void Metrics::set(const std::string& key, double value) { put(key, format_fixed6(value)); }
void Metrics::set(const std::string& key, std::size_t value) { put(key, std::to_string(value)); }
void Metrics::set(const std::string& key, int value) { put(key, std::to_string(value)); }
void Metrics::set(const std::string& key, const std::string& value) {
  if (value.find('\n') != std::string::npos) throw std::invalid_argument("Metrics: multi-line value");
  put(key, value);
}

void Metrics::write(std::ostream& out) const {
  for (const auto& [k, v] : records_) out << k << '=' << v << '\n';
}

void Metrics::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write metrics file " + path.string());
  write(out);
}

std::map<std::string, std::string> read_metrics(std::istream& in) {
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw std::runtime_error("metrics line " + std::to_string(n) + ": expected key=value");
    }
    out[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return out;
}

std::map<std::string, std::string> load_metrics(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open metrics file " + path.string());
  return read_metrics(in);
}

}  // namespace s2ga
