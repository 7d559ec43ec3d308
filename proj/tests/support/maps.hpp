// Copyright 2026 The Panofuse Authors. All Rights Reserved.
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

// Small panoptic maps drawn as character grids ('.' is void).

#ifndef PANOFUSE_TESTS_SUPPORT_MAPS_HPP_
#define PANOFUSE_TESTS_SUPPORT_MAPS_HPP_

#include <map>
#include <string>
#include <vector>

#include "panofuse/types.hpp"

namespace panofuse::testing {

struct Seg {
  SegmentId id = 0;
  ClassId class_id = 0;
  bool is_crowd = false;
};

inline PanopticMap MapFromRows(const std::vector<std::string>& rows,
                               const std::map<char, Seg>& legend) {
  PanopticMap map;
  const auto h = static_cast<Eigen::Index>(rows.size());
  const auto w = static_cast<Eigen::Index>(rows.empty() ? 0 : rows[0].size());
  map.ids.setZero(h, w);
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) {
      const char c = rows[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)];
      if (c != '.') map.ids(y, x) = legend.at(c).id;
    }
  }
  for (const auto& [c, s] : legend) {
    map.segments.push_back({s.id, s.class_id, s.is_crowd, std::nullopt, 0});
  }
  map.recount_areas();
  map.drop_empty_segments();
  return map;
}

}  // namespace panofuse::testing

#endif  // PANOFUSE_TESTS_SUPPORT_MAPS_HPP_
