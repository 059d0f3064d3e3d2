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

#include "s2ga/model_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace s2ga {

namespace {

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw std::runtime_error("model file line " + std::to_string(line) + ": " + what);
}

std::size_t header_dim(std::istringstream& in, const std::string& key, std::size_t line) {
  std::string tok;
  if (!(in >> tok) || tok.rfind(key + "=", 0) != 0) fail(line, "expected " + key + "=<n>");
  std::size_t v = 0;
  const char* first = tok.data() + key.size() + 1;
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) fail(line, "bad value for " + key);
  return v;
}

}  // namespace

void write_model(const S2gaModel& model, std::ostream& out) {
  model.validate();
  const SgaConfig& c = model.config;
  out << "S2GA-MODEL v1 p=" << c.p << " m=" << c.m << " q=" << c.q << " d=" << c.d
      << " k=" << c.k_layers << '\n';
  char buf[40];
  for (const S2gaModel::ConstBlock& b : model.blocks()) {
    out << "BLOCK " << b.name << ' ' << b.rows << ' ' << b.cols << '\n';
    for (std::size_t r = 0; r < b.rows; ++r) {
      for (std::size_t col = 0; col < b.cols; ++col) {
        std::snprintf(buf, sizeof(buf), "%.17g", b.values[r * b.cols + col]);
        if (col) out << ',';
        out << buf;
      }
      out << '\n';
    }
  }
}

S2gaModel read_model(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) fail(line_no, "empty model file");
  std::istringstream header(line);
  std::string magic, version;
  header >> magic >> version;
  if (magic != "S2GA-MODEL" || version != "v1") fail(line_no, "not an S2GA-MODEL v1 file");
  SgaConfig cfg;
  cfg.p = header_dim(header, "p", line_no);
  cfg.m = header_dim(header, "m", line_no);
  cfg.q = header_dim(header, "q", line_no);
  cfg.d = header_dim(header, "d", line_no);
  cfg.k_layers = header_dim(header, "k", line_no);
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    fail(line_no, e.what());
  }

  S2gaModel model = S2gaModel::zeros(cfg);
  for (S2gaModel::Block& b : model.blocks()) {
    ++line_no;
    if (!std::getline(in, line)) fail(line_no, "missing block " + b.name);
    std::istringstream bh(line);
    std::string tag, name;
    std::size_t rows = 0, cols = 0;
    if (!(bh >> tag >> name >> rows >> cols) || tag != "BLOCK") fail(line_no, "expected BLOCK header");
    if (name != b.name || rows != b.rows || cols != b.cols) {
      fail(line_no, "expected block " + b.name + " " + std::to_string(b.rows) + "x" +
                        std::to_string(b.cols) + ", found " + name + " " + std::to_string(rows) +
                        "x" + std::to_string(cols));
    }
    for (std::size_t r = 0; r < rows; ++r) {
      ++line_no;
      if (!std::getline(in, line)) fail(line_no, "truncated block " + b.name);
      std::size_t col = 0;
      std::size_t pos = 0;
      while (pos <= line.size()) {
        std::size_t end = line.find(',', pos);
        if (end == std::string::npos) end = line.size();
        if (col >= cols) fail(line_no, "too many values");
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(line.data() + pos, line.data() + end, v);
        if (ec != std::errc() || ptr != line.data() + end) fail(line_no, "bad real");
        b.values[r * cols + col++] = v;
        pos = end + 1;
      }
      if (col != cols) fail(line_no, "expected " + std::to_string(cols) + " values");
    }
  }
  return model;
}

void save_model(const S2gaModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write model file " + path.string());
  write_model(model, out);
}

S2gaModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file " + path.string());
  return read_model(in);
}

}  // namespace s2ga
