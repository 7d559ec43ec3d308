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

#include "panofuse/postprocess.hpp"

#include <unordered_map>
#include <unordered_set>

namespace panofuse {

void PostprocessReport::append(const PostprocessReport& other) {
  pixels_voided_unknown += other.pixels_voided_unknown;
  stuff_segments_removed.insert(stuff_segments_removed.end(),
                                other.stuff_segments_removed.begin(),
                                other.stuff_segments_removed.end());
}

std::pair<PanopticMap, PostprocessReport> ApplyUnknownMode(
    const PanopticMap& map, const LabelImage& semantic,
    const LabelSpace& labels) {
  if (semantic.rows() != map.ids.rows() || semantic.cols() != map.ids.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "semantic argmax and panoptic map differ in size");
  }
  std::unordered_set<SegmentId> stuff_segments;
  for (const auto& s : map.segments) {
    if (labels.is_stuff(s.class_id)) stuff_segments.insert(s.id);
  }

  PanopticMap out = map;
  PostprocessReport report;
  std::unordered_map<SegmentId, std::int64_t> removed;
  for (Eigen::Index i = 0; i < out.ids.size(); ++i) {
    SegmentId& id = out.ids.data()[i];
    if (id == 0 || !stuff_segments.contains(id)) continue;
    const ClassId sem = semantic.data()[i];
    if (sem != kVoidId && labels.is_thing(sem)) {
      ++removed[id];
      id = 0;
    }
  }
  for (auto& s : out.segments) {
    auto it = removed.find(s.id);
    if (it == removed.end()) continue;
    s.area -= it->second;
    report.pixels_voided_unknown += it->second;
  }
  out.drop_empty_segments();
  return {std::move(out), std::move(report)};
}

std::pair<PanopticMap, PostprocessReport> RemoveSmallStuff(
    const PanopticMap& map, const LabelSpace& labels, std::int64_t threshold) {
  PanopticMap out = map;
  PostprocessReport report;
  std::unordered_set<SegmentId> doomed;
  for (const auto& s : map.segments) {
    if (labels.is_stuff(s.class_id) && s.area < threshold) {
      doomed.insert(s.id);
      report.stuff_segments_removed.push_back({s.class_id, s.area});
    }
  }
  if (doomed.empty()) return {std::move(out), std::move(report)};
  for (Eigen::Index i = 0; i < out.ids.size(); ++i) {
    SegmentId& id = out.ids.data()[i];
    if (id != 0 && doomed.contains(id)) id = 0;
  }
  std::erase_if(out.segments,
                [&](const SegmentInfo& s) { return doomed.contains(s.id); });
  return {std::move(out), std::move(report)};
}

}  // namespace panofuse
