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

#include "s2ga/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace s2ga {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

int parse_int(std::string_view tok, std::size_t line, const char* what) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw DatasetFormatError(line, std::string("bad ") + what + " '" + std::string(tok) + "'");
  }
  return v;
}

std::size_t parse_dim(std::string_view tok, std::string_view key, std::size_t line) {
  if (tok.substr(0, key.size()) != key || tok.size() <= key.size() || tok[key.size()] != '=') {
    throw DatasetFormatError(line, "expected " + std::string(key) + "=<n> in header, got '" +
                                       std::string(tok) + "'");
  }
  const int v = parse_int(tok.substr(key.size() + 1), line, "dimension");
  if (v < 1) throw DatasetFormatError(line, "dimension " + std::string(key) + " must be >= 1");
  return static_cast<std::size_t>(v);
}

std::vector<double> parse_reals(std::string_view tok, std::size_t expected, std::size_t line) {
  std::vector<double> out;
  out.reserve(expected);
  std::size_t i = 0;
  while (i <= tok.size()) {
    std::size_t j = tok.find(',', i);
    if (j == std::string_view::npos) j = tok.size();
    const std::string_view field = tok.substr(i, j - i);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
      throw DatasetFormatError(line, "bad real '" + std::string(field) + "'");
    }
    if (!std::isfinite(v)) throw DatasetFormatError(line, "non-finite real");
    out.push_back(v);
    i = j + 1;
  }
  if (out.size() != expected) {
    throw DatasetFormatError(line, "expected " + std::to_string(expected) + " values, got " +
                                       std::to_string(out.size()));
  }
  return out;
}

void write_reals(std::ostream& out, std::span<const double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out << ',';
    out << format_real9(values[i]);
  }
}

}  // namespace

DatasetFormatError::DatasetFormatError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

std::string format_real9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

void ZslDataset::validate() const {
  if (p == 0 || m == 0 || q == 0) throw std::invalid_argument("dataset: p, m, q must be >= 1");
  std::set<int> class_ids;
  for (const ClassRecord& c : classes) {
    if (!class_ids.insert(c.id).second) {
      throw std::invalid_argument("dataset: duplicate class id " + std::to_string(c.id));
    }
    if (c.semantic.size() != q) {
      throw std::invalid_argument("dataset: class " + std::to_string(c.id) + " has " +
                                  std::to_string(c.semantic.size()) + " semantic values, q=" +
                                  std::to_string(q));
    }
    if (!all_finite(c.semantic.values())) {
      throw std::invalid_argument("dataset: class " + std::to_string(c.id) + " is non-finite");
    }
  }
  std::set<int> image_ids;
  for (const ImageRecord& im : images) {
    if (!image_ids.insert(im.id).second) {
      throw std::invalid_argument("dataset: duplicate image id " + std::to_string(im.id));
    }
    if (!class_ids.count(im.class_id)) {
      throw std::invalid_argument("dataset: image " + std::to_string(im.id) +
                                  " has unknown class " + std::to_string(im.class_id));
    }
    if (im.regions.p() != p || im.regions.m() != m) {
      throw std::invalid_argument("dataset: image " + std::to_string(im.id) + " regions are " +
                                  im.regions.features().shape_string());
    }
  }
  std::set<int> split_ids;
  for (const auto* list : {&seen, &unseen}) {
    for (int id : *list) {
      if (!class_ids.count(id)) {
        throw std::invalid_argument("dataset: split lists unknown class " + std::to_string(id));
      }
      if (!split_ids.insert(id).second) {
        throw std::invalid_argument("dataset: class " + std::to_string(id) +
                                    " appears in more than one split position");
      }
    }
  }
  for (int id : class_ids) {
    if (!split_ids.count(id)) {
      throw std::invalid_argument("dataset: class " + std::to_string(id) + " is in no split");
    }
  }
}

void ZslDataset::canonicalize() {
  std::sort(classes.begin(), classes.end(),
            [](const ClassRecord& a, const ClassRecord& b) { return a.id < b.id; });
  std::sort(images.begin(), images.end(),
            [](const ImageRecord& a, const ImageRecord& b) { return a.id < b.id; });
  std::sort(seen.begin(), seen.end());
  std::sort(unseen.begin(), unseen.end());
}

const ClassRecord& ZslDataset::class_by_id(int id) const {
  for (const ClassRecord& c : classes)
    if (c.id == id) return c;
  throw std::out_of_range("dataset: unknown class id " + std::to_string(id));
}

ClassSemanticTable ZslDataset::table(std::span<const int> class_ids) const {
  Matrix sem(q, class_ids.size());
  std::vector<int> labels;
  labels.reserve(class_ids.size());
  for (std::size_t c = 0; c < class_ids.size(); ++c) {
    sem.set_col(c, class_by_id(class_ids[c]).semantic);
    labels.push_back(class_ids[c]);
  }
  return ClassSemanticTable(std::move(sem), std::move(labels));
}

std::vector<const ImageRecord*> ZslDataset::images_of(std::span<const int> class_ids) const {
  const std::set<int> wanted(class_ids.begin(), class_ids.end());
  std::vector<const ImageRecord*> out;
  for (const ImageRecord& im : images)
    if (wanted.count(im.class_id)) out.push_back(&im);
  return out;
}

ZslDataset read_dataset(std::istream& in) {
  ZslDataset ds;
  enum class Section { header, classes, images, seen, unseen, done } section = Section::header;
  std::set<int> class_ids;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    const auto toks = split_ws(raw);
    if (toks.empty()) continue;

    if (section == Section::header) {
      if (toks.size() != 5 || toks[0] != "ZSLDS" || toks[1] != "v1") {
        throw DatasetFormatError(line_no, "expected header 'ZSLDS v1 p=<p> m=<m> q=<q>'");
      }
      ds.p = parse_dim(toks[2], "p", line_no);
      ds.m = parse_dim(toks[3], "m", line_no);
      ds.q = parse_dim(toks[4], "q", line_no);
      section = Section::classes;
      continue;
    }

    const std::string_view kind = toks[0];
    if (kind == "CLASS") {
      if (section != Section::classes) throw DatasetFormatError(line_no, "CLASS line out of order");
      if (toks.size() != 4) throw DatasetFormatError(line_no, "CLASS needs <id> <parent> <values>");
      ClassRecord c;
      c.id = parse_int(toks[1], line_no, "class id");
      c.parent = parse_int(toks[2], line_no, "parent id");
      c.semantic = Vector(parse_reals(toks[3], ds.q, line_no));
      if (!class_ids.insert(c.id).second) {
        throw DatasetFormatError(line_no, "duplicate class id " + std::to_string(c.id));
      }
      ds.classes.push_back(std::move(c));
    } else if (kind == "IMAGE") {
      if (section == Section::classes) section = Section::images;
      if (section != Section::images) throw DatasetFormatError(line_no, "IMAGE line out of order");
      if (toks.size() != 4) throw DatasetFormatError(line_no, "IMAGE needs <id> <class> <values>");
      ImageRecord im;
      im.id = parse_int(toks[1], line_no, "image id");
      im.class_id = parse_int(toks[2], line_no, "class id");
      if (!class_ids.count(im.class_id)) {
        throw DatasetFormatError(line_no, "unknown class id " + std::to_string(im.class_id));
      }
      const std::vector<double> flat = parse_reals(toks[3], ds.m * ds.p, line_no);
      Matrix features(ds.p, ds.m);
      for (std::size_t region = 0; region < ds.m; ++region)
        for (std::size_t r = 0; r < ds.p; ++r) features(r, region) = flat[region * ds.p + r];
      im.regions = RegionFeatures(std::move(features));
      ds.images.push_back(std::move(im));
    } else if (kind == "SPLIT") {
      if (toks.size() < 2) throw DatasetFormatError(line_no, "SPLIT needs SEEN or UNSEEN");
      std::vector<int>* target = nullptr;
      if (toks[1] == "SEEN" && (section == Section::classes || section == Section::images)) {
        section = Section::seen;
        target = &ds.seen;
      } else if (toks[1] == "UNSEEN" && section == Section::seen) {
        section = Section::unseen;
        target = &ds.unseen;
      } else {
        throw DatasetFormatError(line_no, "SPLIT line out of order or unknown split name");
      }
      for (std::size_t i = 2; i < toks.size(); ++i) {
        const int id = parse_int(toks[i], line_no, "class id");
        if (!class_ids.count(id)) {
          throw DatasetFormatError(line_no, "unknown class id " + std::to_string(id));
        }
        target->push_back(id);
      }
    } else {
      throw DatasetFormatError(line_no, "unknown record '" + std::string(kind) + "'");
    }
  }
  if (section == Section::header) throw DatasetFormatError(line_no, "missing header");
  if (section != Section::unseen) {
    throw DatasetFormatError(line_no, "missing SPLIT SEEN / SPLIT UNSEEN lines");
  }
  try {
    ds.validate();
  } catch (const std::invalid_argument& e) {
    throw DatasetFormatError(line_no, e.what());
  }
  return ds;
}

ZslDataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file " + path.string());
  return read_dataset(in);
}

void write_dataset(const ZslDataset& ds, std::ostream& out) {
  ds.validate();
  ZslDataset sorted = ds;
  sorted.canonicalize();
  out << "ZSLDS v1 p=" << ds.p << " m=" << ds.m << " q=" << ds.q << '\n';
  for (const ClassRecord& c : sorted.classes) {
    out << "CLASS " << c.id << ' ' << c.parent << ' ';
    write_reals(out, c.semantic.values());
    out << '\n';
  }
  std::vector<double> flat(ds.m * ds.p);
  for (const ImageRecord& im : sorted.images) {
    const Matrix& f = im.regions.features();
    for (std::size_t region = 0; region < ds.m; ++region)
      for (std::size_t r = 0; r < ds.p; ++r) flat[region * ds.p + r] = f(r, region);
    out << "IMAGE " << im.id << ' ' << im.class_id << ' ';
    write_reals(out, flat);
    out << '\n';
  }
  out << "SPLIT SEEN";
  for (int id : sorted.seen) out << ' ' << id;
  out << "\nSPLIT UNSEEN";
  for (int id : sorted.unseen) out << ' ' << id;
  out << '\n';
}

void save_dataset(const ZslDataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write dataset file " + path.string());
  write_dataset(ds, out);
  out.flush();
  if (!out) throw std::runtime_error("error while writing dataset file " + path.string());
}

}  // namespace s2ga
