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

// Synthetic scenes and simulated branch outputs.
//
// A scene is a stuff layout (horizontal bands or a Voronoi partition) with
// rectangular and elliptical things painted on top in placement order.
// Ground-truth detections are the tight boxes of the visible thing pixels
// and the ground-truth center field points every thing pixel exactly at its
// box center. Degrade() turns a scene into what a network might emit:
// margin-scaled one-hot logits with Gaussian noise, dropped / spurious /
// jittered detections and noisy center offsets.
//
// All randomness comes from panofuse::Rng, so a (spec, seed) pair always
// yields the same bits on every platform.

#ifndef PANOFUSE_SYNTH_HPP_
#define PANOFUSE_SYNTH_HPP_

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "panofuse/types.hpp"

namespace panofuse {

enum class StuffLayout { kHorizontalBands, kVoronoi };

std::optional<StuffLayout> ParseStuffLayout(std::string_view name);
std::string_view StuffLayoutName(StuffLayout layout);

struct SceneSpec {
  int width = 64;
  int height = 64;
  LabelSpace labels;
  std::uint64_t rng_seed = 0;
  int n_things = 4;
  int thing_size_min = 8;
  int thing_size_max = 24;
  bool allow_same_class_overlap = false;
  StuffLayout stuff_layout = StuffLayout::kHorizontalBands;
  /// Number of distinct stuff classes laid out; at most the stuff count.
  int stuff_regions = 3;
};

struct Scene {
  PanopticMap gt;
  LabelImage gt_sem;
  std::vector<Detection> gt_dets;
  /// Segment id in `gt` of each ground-truth detection.
  std::vector<SegmentId> det_segments;
  CenterField<float> gt_centers;
};

struct DegradationSpec {
  double logit_noise_sigma = 0.0;
  double logit_margin = 4.0;
  double drop_detection_prob = 0.0;
  double spurious_detection_prob = 0.0;
  double box_jitter_sigma = 0.0;
  double offset_noise_sigma = 0.0;
  /// Square islands of a stuff class absent from the scene, planted on stuff
  /// pixels.
  int small_stuff_fragments = 0;
  int fragment_size = 3;
};

struct BranchOutputs {
  LogitTensor<float> logits;
  std::vector<Detection> detections;
  /// Ground-truth detection index behind each output detection; nullopt for
  /// spurious ones.
  std::vector<std::optional<std::size_t>> truth;
  CenterField<float> centers;
};

/// Things get ids 1..n_things, stuff the following ids.
LabelSpace MakeSyntheticLabels(int n_things, int n_stuff);

/// Throws kInfeasibleSpec when the spec is invalid or things cannot be
/// placed.
Scene GenerateScene(const SceneSpec& spec);

BranchOutputs Degrade(const Scene& scene, const LabelSpace& labels,
                      const DegradationSpec& spec, std::uint64_t rng_seed);

/// Pixels whose gt is a thing lying inside at least two same-class gt boxes,
/// paired with the index of their true detection.
struct OverlapPixel {
  int x = 0;
  int y = 0;
  std::size_t owner = 0;
};
std::vector<OverlapPixel> SameClassOverlapPixels(const Scene& scene);

}  // namespace panofuse

#endif  // PANOFUSE_SYNTH_HPP_
