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

#include "panofuse/fusion.hpp"
#include "panofuse/metrics.hpp"
#include "panofuse/random.hpp"
#include "panofuse/synth.hpp"

namespace panofuse {
namespace {

SceneSpec BasicSpec(std::uint64_t seed) {
  SceneSpec spec;
  spec.labels = MakeSyntheticLabels(3, 4);
  spec.rng_seed = seed;
  return spec;
}

TEST(Rng, KnownDraws) {
  // mt19937_64 with the default seed produces 9981545732273789042 as its
  // 10000th output; the first few words anchor the derived draws.
  Rng a(5489);
  for (int i = 0; i < 9999; ++i) a.next();
  EXPECT_EQ(a.next(), 9981545732273789042ull);

  Rng b(1), c(1);
  for (int i = 0; i < 1000; ++i) {
    const double u = b.uniform01();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    EXPECT_EQ(u, c.uniform01());
    const auto k = b.uniform_int(-3, 3);
    ASSERT_GE(k, -3);
    ASSERT_LE(k, 3);
    c.uniform_int(-3, 3);
  }
  EXPECT_EQ(MixSeed(0), 0xe220a8397b1dcdafull);
}

TEST(MakeSyntheticLabels, ThingsFirst) {
  const LabelSpace labels = MakeSyntheticLabels(2, 3);
  EXPECT_EQ(labels.thing_ids(), (std::vector<ClassId>{1, 2}));
  EXPECT_EQ(labels.stuff_ids(), (std::vector<ClassId>{3, 4, 5}));
}

TEST(GenerateScene, NoThingsIsStuffOnly) {
  SceneSpec spec = BasicSpec(3);
  spec.n_things = 0;
  const Scene scene = GenerateScene(spec);
  EXPECT_TRUE(scene.gt_dets.empty());
  EXPECT_EQ(scene.gt.void_pixels(), 0);
  for (const auto& s : scene.gt.segments) EXPECT_TRUE(spec.labels.is_stuff(s.class_id));
}

TEST(GenerateScene, DeterministicPerSeed) {
  EXPECT_EQ(GenerateScene(BasicSpec(11)).gt, GenerateScene(BasicSpec(11)).gt);
  EXPECT_NE(GenerateScene(BasicSpec(11)).gt, GenerateScene(BasicSpec(12)).gt);
}

TEST(GenerateScene, InfeasibleSpecs) {
  auto code = [](const SceneSpec& s) {
    try {
      GenerateScene(s);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kIo;
  };
  SceneSpec s = BasicSpec(0);
  s.stuff_regions = 5;
  EXPECT_EQ(code(s), ErrorCode::kInfeasibleSpec);
  s = BasicSpec(0);
  s.thing_size_min = 65;
  s.thing_size_max = 70;
  EXPECT_EQ(code(s), ErrorCode::kInfeasibleSpec);
  s = BasicSpec(0);
  s.labels = MakeSyntheticLabels(1, 1);
  s.stuff_regions = 1;
  s.n_things = 30;
  s.thing_size_min = 40;
  s.thing_size_max = 40;
  EXPECT_EQ(code(s), ErrorCode::kInfeasibleSpec);
  s = BasicSpec(0);
  s.labels = MakeSyntheticLabels(2, 0);
  EXPECT_EQ(code(s), ErrorCode::kInfeasibleSpec);
}

TEST(GenerateSceneProperty, BoxesAreTightAndCentersExact) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    SceneSpec spec = BasicSpec(seed);
    spec.n_things = 6;
    spec.allow_same_class_overlap = seed % 2 == 0;
    spec.stuff_layout = seed % 3 == 0 ? StuffLayout::kVoronoi : StuffLayout::kHorizontalBands;
    const Scene scene = GenerateScene(spec);
    ASSERT_NO_THROW(scene.gt.check_consistency());
    ASSERT_EQ(scene.gt_dets.size(), scene.det_segments.size());
    for (std::size_t i = 0; i < scene.gt_dets.size(); ++i) {
      const Detection& d = scene.gt_dets[i];
      int min_x = 1 << 30, max_x = -1, min_y = 1 << 30, max_y = -1;
      for (int y = 0; y < scene.gt.height(); ++y) {
        for (int x = 0; x < scene.gt.width(); ++x) {
          if (scene.gt.ids(y, x) != scene.det_segments[i]) continue;
          EXPECT_TRUE(d.box.contains(x, y));
          min_x = std::min(min_x, x);
          max_x = std::max(max_x, x);
          min_y = std::min(min_y, y);
          max_y = std::max(max_y, y);
          const Eigen::Vector2d q = scene.gt_centers.predicted_center(x, y);
          EXPECT_EQ(q, d.box.center());
        }
      }
      EXPECT_EQ(d.box.x_min, min_x);
      EXPECT_EQ(d.box.width, max_x - min_x + 1);
      EXPECT_EQ(d.box.y_min, min_y);
      EXPECT_EQ(d.box.height, max_y - min_y + 1);
      EXPECT_EQ(scene.gt.find(scene.det_segments[i])->class_id, d.class_id);
      // Distinct same-class centers.
      for (std::size_t j = 0; j < i; ++j) {
        if (scene.gt_dets[j].class_id == d.class_id) {
          EXPECT_NE(scene.gt_dets[j].box.center(), d.box.center());
        }
      }
    }
    if (!spec.allow_same_class_overlap) {
      EXPECT_TRUE(SameClassOverlapPixels(scene).empty());
    }
  }
}

TEST(Degrade, CleanOutputsMatchGroundTruth) {
  const Scene scene = GenerateScene(BasicSpec(4));
  const BranchOutputs out = Degrade(scene, BasicSpec(4).labels, {}, 4);
  EXPECT_EQ(out.detections, scene.gt_dets);
  EXPECT_EQ(SemanticArgmax(out.logits), scene.gt_sem);
  EXPECT_EQ(out.centers.tensor(), scene.gt_centers.tensor());
  for (std::size_t i = 0; i < out.truth.size(); ++i) EXPECT_EQ(out.truth[i], i);
}

TEST(Degrade, DropEverythingLeavesOnlyStuff) {
  SceneSpec spec = BasicSpec(8);
  spec.n_things = 5;
  const Scene scene = GenerateScene(spec);
  DegradationSpec d;
  d.drop_detection_prob = 1.0;
  const BranchOutputs out = Degrade(scene, spec.labels, d, 8);
  EXPECT_TRUE(out.detections.empty());
  const PanopticMap fused = Fuse<float>(spec.labels, out.logits, out.detections,
                                        nullptr, FusionConfig{});
  for (const auto& s : fused.segments) EXPECT_TRUE(spec.labels.is_stuff(s.class_id));
}

TEST(Degrade, FragmentsUseAbsentStuffClasses) {
  SceneSpec spec = BasicSpec(2);
  spec.stuff_regions = 2;
  const Scene scene = GenerateScene(spec);
  DegradationSpec d;
  d.small_stuff_fragments = 2;
  d.fragment_size = 3;
  const BranchOutputs out = Degrade(scene, spec.labels, d, 2);
  const LabelImage sem = SemanticArgmax(out.logits);
  int changed = 0;
  for (int y = 0; y < sem.rows(); ++y) {
    for (int x = 0; x < sem.cols(); ++x) {
      if (sem(y, x) == scene.gt_sem(y, x)) continue;
      ++changed;
      EXPECT_TRUE(spec.labels.is_stuff(scene.gt_sem(y, x)));
      EXPECT_FALSE((scene.gt_sem.array() == sem(y, x)).any());
    }
  }
  EXPECT_GT(changed, 0);
  EXPECT_LE(changed, 18);
}

std::vector<FusionConfig> PolicyConfigs() {
  std::vector<FusionConfig> out;
  for (OverlapPolicy p : {OverlapPolicy::kHighestConfidence,
                          OverlapPolicy::kSmallestFirst,
                          OverlapPolicy::kClosestCenter}) {
    FusionConfig cfg;
    cfg.policy = p;
    out.push_back(cfg);
  }
  return out;
}

TEST(SynthRoundTrip, NoiseFreeReproducesGroundTruth) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    SceneSpec spec = BasicSpec(seed);
    spec.n_things = 5;
    spec.stuff_layout = seed % 2 ? StuffLayout::kVoronoi : StuffLayout::kHorizontalBands;
    const Scene scene = GenerateScene(spec);
    const BranchOutputs out = Degrade(scene, spec.labels, {}, seed);
    for (const FusionConfig& cfg : PolicyConfigs()) {
      const PanopticMap fused =
          Fuse<float>(spec.labels, out.logits, out.detections, &out.centers, cfg);
      ASSERT_TRUE(SamePartition(fused, scene.gt)) << seed;
      ASSERT_EQ(fused.class_image(), scene.gt.class_image()) << seed;
      PqAccumulator acc;
      acc.add(MatchSegments(scene.gt, fused, spec.labels));
      const PqScores pq = ComputePq(acc, spec.labels);
      EXPECT_EQ(pq.pq, 1.0);
    }
  }
}

TEST(SynthRoundTrip, CenterAssignmentExactWithTrueOffsets) {
  std::size_t checked = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    SceneSpec spec = BasicSpec(seed);
    spec.labels = MakeSyntheticLabels(1, 2);
    spec.stuff_regions = 2;
    spec.n_things = 6;
    spec.allow_same_class_overlap = true;
    const Scene scene = GenerateScene(spec);
    FusionConfig cfg;
    cfg.policy = OverlapPolicy::kClosestCenter;
    const PanopticMap fused = Fuse<float>(spec.labels, Degrade(scene, spec.labels, {}, seed).logits,
                    scene.gt_dets, &scene.gt_centers, cfg);
    for (const OverlapPixel& p : SameClassOverlapPixels(scene)) {
      const SegmentInfo* s = fused.find(fused.ids(p.y, p.x));
      ASSERT_NE(s, nullptr);
      EXPECT_EQ(s->source_detection, p.owner);
      ++checked;
    }
  }
  EXPECT_GT(checked, 0u);
}

TEST(SynthProperty, PqDoesNotImproveWithLogitNoise) {
  const std::vector<double> sigmas = {0.0, 1.0, 2.5};
  std::vector<double> mean(sigmas.size(), 0.0);
  constexpr int kSeeds = 100;
  for (int seed = 0; seed < kSeeds; ++seed) {
    const SceneSpec spec = BasicSpec(static_cast<std::uint64_t>(seed));
    const Scene scene = GenerateScene(spec);
    for (std::size_t i = 0; i < sigmas.size(); ++i) {
      DegradationSpec d;
      d.logit_noise_sigma = sigmas[i];
      const BranchOutputs out = Degrade(scene, spec.labels, d, static_cast<std::uint64_t>(seed));
      const PanopticMap fused =
          Fuse<float>(spec.labels, out.logits, out.detections, nullptr, FusionConfig{});
      PqAccumulator acc;
      acc.add(MatchSegments(scene.gt, fused, spec.labels));
      const double pq = ComputePq(acc, spec.labels).pq.value_or(0.0);
      if (i == 0) {
        EXPECT_EQ(pq, 1.0) << seed;
      }
      mean[i] += pq;
    }
  }
  for (double& m : mean) m /= kSeeds;
  for (std::size_t i = 1; i < sigmas.size(); ++i) EXPECT_LE(mean[i], mean[i - 1] + 0.01);
}

}  // namespace
}  // namespace panofuse
