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

// Model file:
//
//   S2GA-MODEL v1 p=<p> m=<m> q=<q> d=<d> k=<K>
//   BLOCK <name> <rows> <cols>
//   <row 0: cols comma-separated reals>
//   ...
//
// Blocks follow S2gaModel::blocks() order. Reals use 17 significant digits
// so a save/load round trip is exact.

#ifndef S2GA_MODEL_IO_HPP
#define S2GA_MODEL_IO_HPP

#include <filesystem>
#include <iosfwd>

#include "s2ga/model.hpp"

namespace s2ga {

void write_model(const S2gaModel& model, std::ostream& out);
S2gaModel read_model(std::istream& in);
void save_model(const S2gaModel& model, const std::filesystem::path& path);
S2gaModel load_model(const std::filesystem::path& path);

}  // namespace s2ga

#endif  // S2GA_MODEL_IO_HPP
