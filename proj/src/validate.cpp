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

#include "panofuse/validate.hpp"

namespace panofuse {

void ValidateDetection(const LabelSpace& labels, const Detection& det,
                       std::size_t index) {
  const std::string where = "detection " + std::to_string(index);
  if (!labels.contains(det.class_id)) {
    throw Error(ErrorCode::kUnknownClass,
                where + " has unknown class " + std::to_string(det.class_id));
  }
  if (!labels.is_thing(det.class_id)) {
    throw Error(ErrorCode::kStuffDetection,
                where + " carries stuff class " +
                    labels.at(det.class_id).name);
  }
  if (!(det.score >= 0.0 && det.score <= 1.0)) {
    throw Error(ErrorCode::kScoreOutOfRange,
                where + " has score " + std::to_string(det.score));
  }
  if (!(det.box.width > 0.0 && det.box.height > 0.0) ||
      !std::isfinite(det.box.x_min) || !std::isfinite(det.box.y_min) ||
      !std::isfinite(det.box.width) || !std::isfinite(det.box.height)) {
    throw Error(ErrorCode::kNegativeBoxSize,
                where + " needs a finite box with positive width and height");
  }
}

}  // namespace panofuse
