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

#ifndef PANOFUSE_POSTPROCESS_HPP_
#define PANOFUSE_POSTPROCESS_HPP_

#include <cstdint>
#include <utility>
#include <vector>

#include "panofuse/types.hpp"

namespace panofuse {

struct StuffRemoval {
  ClassId class_id = 0;
  std::int64_t area = 0;
  bool operator==(const StuffRemoval&) const = default;
};

struct PostprocessReport {
  std::int64_t pixels_voided_unknown = 0;
  std::vector<StuffRemoval> stuff_segments_removed;

  void append(const PostprocessReport& other);
  bool operator==(const PostprocessReport&) const = default;
};

/// Voids every pixel that fusion gave to a stuff segment although the plain
/// semantic argmax there is a thing class (a thing region no detection
/// claimed). Emptied segments are dropped.
std::pair<PanopticMap, PostprocessReport> ApplyUnknownMode(
    const PanopticMap& map, const LabelImage& semantic, const LabelSpace& labels);

/// Voids stuff segments with strictly fewer than `threshold` pixels. The
/// threshold is absolute; scale it yourself for other image resolutions.
std::pair<PanopticMap, PostprocessReport> RemoveSmallStuff(
    const PanopticMap& map, const LabelSpace& labels, std::int64_t threshold);

}  // namespace panofuse

#endif  // PANOFUSE_POSTPROCESS_HPP_
