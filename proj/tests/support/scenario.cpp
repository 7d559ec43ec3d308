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

#include "support/scenario.hpp"

#include <unordered_map>

#include "panofuse/random.hpp"

namespace panofuse::testing {

RandomCase MakeRandomCase(std::uint64_t seed, int size) {
  Rng rng(MixSeed(seed ^ 0x5eedca5eull));
  RandomCase c;
  c.labels = MakeSyntheticLabels(6, 6);

  SceneSpec spec;
  spec.width = size;
  spec.height = size;
  spec.labels = c.labels;
  spec.rng_seed = seed;
  spec.n_things = static_cast<int>(rng.uniform_int(0, 8));
  spec.thing_size_min = 4;
  spec.thing_size_max = size / 2;
  spec.allow_same_class_overlap = rng.bernoulli(0.7);
  spec.stuff_layout =
      rng.bernoulli(0.5) ? StuffLayout::kHorizontalBands : StuffLayout::kVoronoi;
  spec.stuff_regions = static_cast<int>(rng.uniform_int(1, 4));
  c.scene = GenerateScene(spec);

  DegradationSpec d;
  d.logit_margin = rng.uniform(0.5, 4.0);
  d.logit_noise_sigma = rng.bernoulli(0.5) ? 0.0 : rng.uniform(0.1, 3.0);
  d.drop_detection_prob = rng.uniform(0.0, 0.3);
  d.spurious_detection_prob = rng.uniform(0.0, 0.6);
  d.box_jitter_sigma = rng.bernoulli(0.5) ? 0.0 : rng.uniform(0.0, 3.0);
  d.offset_noise_sigma = rng.uniform(0.0, 4.0);
  d.small_stuff_fragments = static_cast<int>(rng.uniform_int(0, 3));
  d.fragment_size = static_cast<int>(rng.uniform_int(2, 5));
  c.outputs = Degrade(c.scene, c.labels, d, seed);
  constexpr std::size_t kMaxDetections = 8;
  if (c.outputs.detections.size() > kMaxDetections) {
    c.outputs.detections.resize(kMaxDetections);
    c.outputs.truth.resize(kMaxDetections);
  }

  // Random scores so the confidence order is not just the input order.
  for (auto& det : c.outputs.detections) {
    if (rng.bernoulli(0.6)) det.score = rng.uniform01();
  }
  return c;
}

std::vector<FusionConfig> AllConfigs(std::int64_t stuff_threshold) {
  std::vector<FusionConfig> out;
  for (OverlapPolicy p : {OverlapPolicy::kHighestConfidence,
                          OverlapPolicy::kSmallestFirst,
                          OverlapPolicy::kClosestCenter}) {
    for (int pp = 0; pp < 4; ++pp) {
      FusionConfig cfg;
      cfg.policy = p;
      cfg.unknown_mode = (pp & 1) != 0;
      cfg.stuff_area_threshold = (pp & 2) != 0 ? stuff_threshold : 0;
      out.push_back(cfg);
    }
  }
  return out;
}

std::vector<PixelOwner> OwnerImage(const PanopticMap& map) {
  std::unordered_map<SegmentId, PixelOwner> lut;
  for (const auto& s : map.segments) {
    lut[s.id] = {s.class_id, s.source_detection
                                 ? static_cast<std::int64_t>(*s.source_detection)
                                 : -1};
  }
  std::vector<PixelOwner> out(static_cast<std::size_t>(map.ids.size()));
  for (Eigen::Index i = 0; i < map.ids.size(); ++i) {
    const SegmentId id = map.ids.data()[i];
    if (id != 0) out[static_cast<std::size_t>(i)] = lut.at(id);
  }
  return out;
}

}  // namespace panofuse::testing
