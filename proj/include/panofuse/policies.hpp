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

// Resolution of pixels claimed by several detections of the same class.

#ifndef PANOFUSE_POLICIES_HPP_
#define PANOFUSE_POLICIES_HPP_

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "panofuse/types.hpp"

namespace panofuse {

enum class OverlapPolicy { kHighestConfidence, kSmallestFirst, kClosestCenter };

/// "hc", "sf", "cc".
std::string_view PolicyName(OverlapPolicy policy);
std::optional<OverlapPolicy> ParsePolicy(std::string_view name);

/// Detection indices by decreasing priority, plus the inverse permutation.
class PolicyOrder {
 public:
  PolicyOrder() = default;
  /// Throws kInvalidArgument unless `priority` is a permutation of 0..n-1.
  explicit PolicyOrder(std::vector<std::size_t> priority);

  const std::vector<std::size_t>& priority() const { return priority_; }
  /// Position of detection `index` in the priority list (0 = highest).
  std::size_t rank(std::size_t index) const { return rank_[index]; }
  std::size_t size() const { return priority_.size(); }

 private:
  std::vector<std::size_t> priority_;
  std::vector<std::size_t> rank_;
};

/// Score descending, ties by lower index.
PolicyOrder OrderHighestConfidence(std::span<const Detection> detections);

/// Box area ascending, ties by lower index.
PolicyOrder OrderSmallestFirst(std::span<const Detection> detections);

/// Candidate with the best position in `order`. `candidates` must be
/// non-empty.
std::size_t AssignByOrder(std::span<const std::size_t> candidates,
                          const PolicyOrder& order);

/// Squared distance between a predicted center and a box center. Shared by
/// every code path that compares centers so the comparisons agree bitwise.
inline double SquaredCenterDistance(const Eigen::Vector2d& predicted,
                                    const BoundingBox& box) {
  const double ex = predicted.x() - (box.x_min + box.width / 2.0);
  const double ey = predicted.y() - (box.y_min + box.height / 2.0);
  return ex * ex + ey * ey;
}

/// Candidate whose box center is nearest (squared L2, exact compare) to the
/// center predicted at pixel (x, y); ties by lower index.
template <typename Scalar>
std::size_t AssignClosestCenter(int x, int y,
                                std::span<const std::size_t> candidates,
                                std::span<const Detection> detections,
                                const CenterField<Scalar>& centers) {
  if (candidates.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no candidate detections");
  }
  const Eigen::Vector2d q = centers.predicted_center(x, y);
  std::size_t best = candidates.front();
  double best_d = SquaredCenterDistance(q, detections[best].box);
  for (std::size_t idx : candidates.subspan(1)) {
    const double d = SquaredCenterDistance(q, detections[idx].box);
    if (d < best_d || (d == best_d && idx < best)) {
      best = idx;
      best_d = d;
    }
  }
  return best;
}

}  // namespace panofuse

#endif  // PANOFUSE_POLICIES_HPP_
