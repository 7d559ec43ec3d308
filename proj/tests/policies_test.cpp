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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "panofuse/policies.hpp"
#include "panofuse/random.hpp"

namespace panofuse {
namespace {

std::vector<Detection> WithScores(std::initializer_list<double> scores) {
  std::vector<Detection> out;
  for (double s : scores) out.push_back({1, {0, 0, 1, 1}, s});
  return out;
}

std::vector<Detection> WithAreas(std::initializer_list<double> areas) {
  std::vector<Detection> out;
  for (double a : areas) out.push_back({1, {0, 0, a, 1}, 0.5});
  return out;
}

using Priority = std::vector<std::size_t>;

TEST(OrderHighestConfidence, SortsByScoreDescending) {
  EXPECT_EQ(OrderHighestConfidence(WithScores({0.5, 0.9, 0.7})).priority(),
            (Priority{1, 2, 0}));
  EXPECT_EQ(OrderHighestConfidence(WithScores({0.8, 0.8})).priority(),
            (Priority{0, 1}));
  EXPECT_TRUE(OrderHighestConfidence({}).priority().empty());
}

TEST(OrderSmallestFirst, SortsByAreaAscending) {
  EXPECT_EQ(OrderSmallestFirst(WithAreas({100, 25, 50})).priority(),
            (Priority{1, 2, 0}));
  EXPECT_EQ(OrderSmallestFirst(WithAreas({30, 30})).priority(), (Priority{0, 1}));
  EXPECT_EQ(OrderSmallestFirst(WithAreas({12})).priority(), (Priority{0}));
}

TEST(PolicyOrder, RejectsNonPermutation) {
  EXPECT_THROW(PolicyOrder({0, 0}), Error);
  EXPECT_THROW(PolicyOrder({1, 2}), Error);
  const PolicyOrder order({2, 0, 1});
  EXPECT_EQ(order.rank(2), 0u);
  EXPECT_EQ(order.rank(1), 2u);
}

TEST(AssignByOrder, PicksBestRankedCandidate) {
  const PolicyOrder order({1, 2, 0});
  const std::vector<std::size_t> c02 = {0, 2};
  EXPECT_EQ(AssignByOrder(c02, order), 2u);
  const PolicyOrder four({3, 0, 1, 2});
  const std::vector<std::size_t> c3 = {3};
  EXPECT_EQ(AssignByOrder(c3, four), 3u);
  const std::vector<std::size_t> c01 = {0, 1};
  EXPECT_EQ(AssignByOrder(c01, PolicyOrder({0, 1})), 0u);
}

TEST(AssignClosestCenter, ExactHitWins) {
  CenterField<float> centers(8, 8);
  centers.dx(5, 5) = 1.0f;
  centers.dy(5, 5) = -0.5f;
  // A centered at (6.5, 5.0); B centered at (4, 4).
  const std::vector<Detection> dets = {{1, {5.5, 4.0, 2.0, 2.0}, 0.5},
                                       {1, {3.0, 3.0, 2.0, 2.0}, 0.5}};
  const std::vector<std::size_t> both = {0, 1};
  EXPECT_EQ(AssignClosestCenter<float>(5, 5, both, dets, centers), 0u);
  const Eigen::Vector2d q = centers.predicted_center(5, 5);
  EXPECT_DOUBLE_EQ(std::sqrt(SquaredCenterDistance(q, dets[1].box)),
                   std::sqrt(2.5 * 2.5 + 1.0));
}

TEST(AssignClosestCenter, EquidistantGoesToLowerIndex) {
  CenterField<double> centers(4, 4);
  // Pixel (1,1) has center (1.5, 1.5); boxes centered at (0.5,1.5), (2.5,1.5).
  const std::vector<Detection> dets = {{1, {1.5, 0.5, 2.0, 2.0}, 0.5},
                                       {1, {-0.5, 0.5, 2.0, 2.0}, 0.5}};
  const std::vector<std::size_t> rev = {1, 0};
  EXPECT_EQ(AssignClosestCenter<double>(1, 1, rev, dets, centers), 0u);
}

TEST(Policies, AlwaysReturnACandidate) {
  Rng rng(3);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto n = static_cast<std::size_t>(rng.uniform_int(1, 8));
    std::vector<Detection> dets;
    for (std::size_t i = 0; i < n; ++i) {
      dets.push_back({1,
                      {rng.uniform(0, 10), rng.uniform(0, 10), rng.uniform(0.5, 8),
                       rng.uniform(0.5, 8)},
                      rng.uniform01()});
    }
    std::vector<std::size_t> cands;
    for (std::size_t i = 0; i < n; ++i) {
      if (rng.bernoulli(0.5)) cands.push_back(i);
    }
    if (cands.empty()) cands.push_back(n - 1);
    CenterField<float> centers(12, 12);
    centers.dx(4, 4) = static_cast<float>(rng.uniform(-5, 5));
    centers.dy(4, 4) = static_cast<float>(rng.uniform(-5, 5));
    const auto in = [&](std::size_t k) {
      return std::find(cands.begin(), cands.end(), k) != cands.end();
    };
    EXPECT_TRUE(in(AssignByOrder(cands, OrderHighestConfidence(dets))));
    EXPECT_TRUE(in(AssignByOrder(cands, OrderSmallestFirst(dets))));
    EXPECT_TRUE(in(AssignClosestCenter<float>(4, 4, cands, dets, centers)));
  }
}

TEST(Policies, HighestConfidenceInvariantUnderMonotoneScoreMap) {
  Rng rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<Detection> dets;
    for (int i = 0; i < 6; ++i) {
      dets.push_back({1, {0, 0, 1, 1}, rng.uniform_int(0, 4) / 4.0});
    }
    std::vector<Detection> mapped = dets;
    for (auto& d : mapped) d.score = std::pow(d.score, 3.0) * 0.5 + 0.1;
    EXPECT_EQ(OrderHighestConfidence(dets).priority(),
              OrderHighestConfidence(mapped).priority());
  }
}

TEST(Policies, SmallestFirstInvariantUnderUniformScaling) {
  Rng rng(6);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<Detection> dets;
    for (int i = 0; i < 6; ++i) {
      dets.push_back({1,
                      {rng.uniform(0, 50), rng.uniform(0, 50),
                       static_cast<double>(rng.uniform_int(1, 6)),
                       static_cast<double>(rng.uniform_int(1, 6))},
                      0.5});
    }
    std::vector<Detection> scaled = dets;
    for (auto& d : scaled) {
      d.box = {d.box.x_min * 2, d.box.y_min * 2, d.box.width * 2, d.box.height * 2};
    }
    EXPECT_EQ(OrderSmallestFirst(dets).priority(),
              OrderSmallestFirst(scaled).priority());
  }
}

TEST(Policies, NamesRoundTrip) {
  for (auto p : {OverlapPolicy::kHighestConfidence, OverlapPolicy::kSmallestFirst,
                 OverlapPolicy::kClosestCenter}) {
    EXPECT_EQ(ParsePolicy(PolicyName(p)), p);
  }
  EXPECT_EQ(ParsePolicy("nms"), std::nullopt);
}

}  // namespace
}  // namespace panofuse
