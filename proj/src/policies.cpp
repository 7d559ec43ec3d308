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

#include "panofuse/policies.hpp"

#include <algorithm>
#include <numeric>

namespace panofuse {

std::string_view PolicyName(OverlapPolicy policy) {
  switch (policy) {
    case OverlapPolicy::kHighestConfidence: return "hc";
    case OverlapPolicy::kSmallestFirst: return "sf";
    case OverlapPolicy::kClosestCenter: return "cc";
  }
  return "?";
}

std::optional<OverlapPolicy> ParsePolicy(std::string_view name) {
  if (name == "hc") return OverlapPolicy::kHighestConfidence;
  if (name == "sf") return OverlapPolicy::kSmallestFirst;
  if (name == "cc") return OverlapPolicy::kClosestCenter;
  return std::nullopt;
}

PolicyOrder::PolicyOrder(std::vector<std::size_t> priority)
    : priority_(std::move(priority)),
      rank_(priority_.size(), priority_.size()) {
  for (std::size_t pos = 0; pos < priority_.size(); ++pos) {
    const std::size_t idx = priority_[pos];
    if (idx >= priority_.size() || rank_[idx] != priority_.size()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "priority is not a permutation");
    }
    rank_[idx] = pos;
  }
}

namespace {

template <typename Less>
PolicyOrder StableOrder(std::size_t n, Less less) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), less);
  return PolicyOrder(std::move(idx));
}

}  // namespace

PolicyOrder OrderHighestConfidence(std::span<const Detection> detections) {
  return StableOrder(detections.size(), [&](std::size_t a, std::size_t b) {
    return detections[a].score > detections[b].score;
  });
}

PolicyOrder OrderSmallestFirst(std::span<const Detection> detections) {
  return StableOrder(detections.size(), [&](std::size_t a, std::size_t b) {
    return detections[a].box.area() < detections[b].box.area();
  });
}

std::size_t AssignByOrder(std::span<const std::size_t> candidates,
                          const PolicyOrder& order) {
  if (candidates.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no candidate detections");
  }
  return *std::min_element(candidates.begin(), candidates.end(),
                           [&](std::size_t a, std::size_t b) {
                             return order.rank(a) < order.rank(b);
                           });
}

}  // namespace panofuse
