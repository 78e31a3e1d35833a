// Copyright 2026 The ivcsim Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ivc/roadnet.hpp"

namespace ivc::testing {

inline std::filesystem::path scenario_path(const std::string& name) {
  return std::filesystem::path(IVC_SCENARIO_DIR) / name;
}

// Straight road along +x made of `count` segments of `length` meters.
inline RoadNetwork straight_road(std::int64_t road_id, const std::string& name, int count, double length,
                                 double y = 0.0) {
  Road r{road_id, name, {}};
  for (int k = 0; k < count; ++k) {
    r.segments.emplace_back(k + 1, std::vector<Point>{{k * length, y}, {(k + 1) * length, y}});
  }
  return RoadNetwork({r});
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

// Plain CSV without quoted fields.
inline std::vector<std::vector<std::string>> read_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) rows.push_back(split(line, ','));
  return rows;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace ivc::testing
