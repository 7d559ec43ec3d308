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

#include "panofuse/synth.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <unordered_map>

#include "panofuse/random.hpp"

namespace panofuse {

namespace {

constexpr int kPlacementAttempts = 500;
constexpr int kSceneAttempts = 50;

struct Placement {
  ClassId class_id = 0;
  int x0 = 0, y0 = 0, w = 0, h = 0;
  bool ellipse = false;

  bool covers(int x, int y) const {
    if (x < x0 || x >= x0 + w || y < y0 || y >= y0 + h) return false;
    if (!ellipse) return true;
    const double rx = w / 2.0;
    const double ry = h / 2.0;
    const double ex = (x + 0.5 - (x0 + rx)) / rx;
    const double ey = (y + 0.5 - (y0 + ry)) / ry;
    return ex * ex + ey * ey <= 1.0;
  }

  bool rect_intersects(const Placement& o) const {
    return x0 < o.x0 + o.w && o.x0 < x0 + w && y0 < o.y0 + o.h &&
           o.y0 < y0 + h;
  }
};

[[noreturn]] void Infeasible(const std::string& why) {
  throw Error(ErrorCode::kInfeasibleSpec, why);
}

void CheckSpec(const SceneSpec& spec) {
  if (spec.width <= 0 || spec.height <= 0) Infeasible("image must be non-empty");
  const auto stuff = spec.labels.stuff_ids();
  if (stuff.empty()) Infeasible("label space has no stuff classes");
  if (spec.stuff_regions < 1 ||
      spec.stuff_regions > static_cast<int>(stuff.size())) {
    Infeasible("stuff_regions must lie in [1, number of stuff classes]");
  }
  if (spec.stuff_layout == StuffLayout::kHorizontalBands &&
      spec.stuff_regions > spec.height) {
    Infeasible("more stuff bands than image rows");
  }
  if (spec.n_things < 0) Infeasible("n_things must be non-negative");
  if (spec.n_things > 0) {
    if (spec.labels.thing_ids().empty()) {
      Infeasible("things requested but the label space has no thing classes");
    }
    if (spec.thing_size_min < 1 || spec.thing_size_min > spec.thing_size_max) {
      Infeasible("thing size range must satisfy 1 <= min <= max");
    }
    if (spec.thing_size_min > std::min(spec.width, spec.height)) {
      Infeasible("things do not fit in the image");
    }
  }
}

LabelImage LayStuff(const SceneSpec& spec, Rng& rng) {
  std::vector<ClassId> stuff = spec.labels.stuff_ids();
  for (std::size_t i = stuff.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
    std::swap(stuff[i - 1], stuff[j]);
  }
  stuff.resize(static_cast<std::size_t>(spec.stuff_regions));

  LabelImage sem(spec.height, spec.width);
  if (spec.stuff_layout == StuffLayout::kHorizontalBands) {
    std::set<int> cuts;
    while (static_cast<int>(cuts.size()) < spec.stuff_regions - 1) {
      cuts.insert(static_cast<int>(rng.uniform_int(1, spec.height - 1)));
    }
    std::vector<int> bounds(cuts.begin(), cuts.end());
    bounds.push_back(spec.height);
    int band = 0;
    for (int y = 0; y < spec.height; ++y) {
      while (y >= bounds[static_cast<std::size_t>(band)]) ++band;
      sem.row(y).setConstant(stuff[static_cast<std::size_t>(band)]);
    }
    return sem;
  }

  std::vector<Eigen::Vector2d> seeds;
  for (int i = 0; i < spec.stuff_regions; ++i) {
    seeds.emplace_back(rng.uniform(0.0, spec.width), rng.uniform(0.0, spec.height));
  }
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      const Eigen::Vector2d c(x + 0.5, y + 0.5);
      std::size_t best = 0;
      double best_d = (seeds[0] - c).squaredNorm();
      for (std::size_t i = 1; i < seeds.size(); ++i) {
        const double d = (seeds[i] - c).squaredNorm();
        if (d < best_d) {
          best = i;
          best_d = d;
        }
      }
      sem(y, x) = stuff[best];
    }
  }
  return sem;
}

std::vector<Placement> PlaceThings(const SceneSpec& spec, Rng& rng) {
  const std::vector<ClassId> things = spec.labels.thing_ids();
  std::vector<Placement> placed;
  for (int t = 0; t < spec.n_things; ++t) {
    bool ok = false;
    for (int attempt = 0; attempt < kPlacementAttempts && !ok; ++attempt) {
      Placement p;
      p.w = static_cast<int>(rng.uniform_int(
          spec.thing_size_min, std::min(spec.thing_size_max, spec.width)));
      p.h = static_cast<int>(rng.uniform_int(
          spec.thing_size_min, std::min(spec.thing_size_max, spec.height)));
      p.x0 = static_cast<int>(rng.uniform_int(0, spec.width - p.w));
      p.y0 = static_cast<int>(rng.uniform_int(0, spec.height - p.h));
      p.class_id = things[static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<std::int64_t>(things.size()) - 1))];
      p.ellipse = rng.bernoulli(0.5);
      ok = spec.allow_same_class_overlap ||
           std::none_of(placed.begin(), placed.end(), [&](const Placement& q) {
             return q.class_id == p.class_id && q.rect_intersects(p);
           });
      if (ok) placed.push_back(p);
    }
    if (!ok) {
      Infeasible("could not place thing " + std::to_string(t) +
                 " without same-class overlap");
    }
  }
  return placed;
}

// Returns false when two same-class instances end up with identical box
// centers, which would make closest-center assignment ambiguous.
bool BuildScene(const SceneSpec& spec, const LabelImage& stuff,
                const std::vector<Placement>& placed, Scene& scene) {
  const int width = spec.width;
  const int height = spec.height;
  Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> inst(
      height, width);
  inst.setConstant(-1);
  for (std::size_t t = 0; t < placed.size(); ++t) {
    const Placement& p = placed[t];
    for (int y = p.y0; y < p.y0 + p.h; ++y) {
      for (int x = p.x0; x < p.x0 + p.w; ++x) {
        if (p.covers(x, y)) inst(y, x) = static_cast<int>(t);
      }
    }
  }

  struct Extent {
    int min_x = std::numeric_limits<int>::max(), min_y = min_x;
    int max_x = -1, max_y = -1;
    std::int64_t area = 0;
  };
  std::vector<Extent> extent(placed.size());
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const int t = inst(y, x);
      if (t < 0) continue;
      Extent& e = extent[static_cast<std::size_t>(t)];
      e.min_x = std::min(e.min_x, x);
      e.min_y = std::min(e.min_y, y);
      e.max_x = std::max(e.max_x, x);
      e.max_y = std::max(e.max_y, y);
      ++e.area;
    }
  }

  std::vector<std::size_t> visible;
  std::vector<BoundingBox> boxes(placed.size());
  for (std::size_t t = 0; t < placed.size(); ++t) {
    const Extent& e = extent[t];
    if (e.area == 0) continue;
    boxes[t] = {static_cast<double>(e.min_x), static_cast<double>(e.min_y),
                static_cast<double>(e.max_x - e.min_x + 1),
                static_cast<double>(e.max_y - e.min_y + 1)};
    for (std::size_t u : visible) {
      if (placed[u].class_id == placed[t].class_id &&
          boxes[u].center() == boxes[t].center()) {
        return false;
      }
    }
    visible.push_back(t);
  }

  scene = Scene{};
  scene.gt_sem = stuff;
  std::vector<std::int64_t> stuff_area(
      static_cast<std::size_t>(spec.labels.size()) + 1, 0);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const int t = inst(y, x);
      if (t >= 0) {
        scene.gt_sem(y, x) = placed[static_cast<std::size_t>(t)].class_id;
      } else {
        ++stuff_area[static_cast<std::size_t>(stuff(y, x))];
      }
    }
  }

  std::vector<SegmentId> stuff_segment(stuff_area.size(), 0);
  std::vector<SegmentId> thing_segment(placed.size(), 0);
  SegmentId next = 1;
  for (ClassId c : spec.labels.stuff_ids()) {
    const auto a = stuff_area[static_cast<std::size_t>(c)];
    if (a == 0) continue;
    stuff_segment[static_cast<std::size_t>(c)] = next;
    scene.gt.segments.push_back({next, c, false, std::nullopt, a});
    ++next;
  }
  for (std::size_t t : visible) {
    thing_segment[t] = next;
    scene.gt.segments.push_back(
        {next, placed[t].class_id, false, std::nullopt, extent[t].area});
    scene.gt_dets.push_back({placed[t].class_id, boxes[t], 1.0});
    scene.det_segments.push_back(next);
    ++next;
  }

  scene.gt.ids.resize(height, width);
  scene.gt_centers = CenterField<float>(height, width);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const int t = inst(y, x);
      if (t < 0) {
        scene.gt.ids(y, x) = stuff_segment[static_cast<std::size_t>(stuff(y, x))];
        continue;
      }
      const auto ut = static_cast<std::size_t>(t);
      scene.gt.ids(y, x) = thing_segment[ut];
      // Box corners are integers, so these offsets are multiples of 0.5 and
      // exact in float.
      const Eigen::Vector2d c = boxes[ut].center();
      scene.gt_centers.dx(y, x) = static_cast<float>(c.x() - (x + 0.5));
      scene.gt_centers.dy(y, x) = static_cast<float>(c.y() - (y + 0.5));
    }
  }
  return true;
}

}  // namespace

std::optional<StuffLayout> ParseStuffLayout(std::string_view name) {
  if (name == "bands" || name == "horizontal_bands") {
    return StuffLayout::kHorizontalBands;
  }
  if (name == "voronoi") return StuffLayout::kVoronoi;
  return std::nullopt;
}

std::string_view StuffLayoutName(StuffLayout layout) {
  return layout == StuffLayout::kVoronoi ? "voronoi" : "bands";
}

LabelSpace MakeSyntheticLabels(int n_things, int n_stuff) {
  std::vector<ClassInfo> classes;
  ClassId id = 1;
  for (int i = 0; i < n_things; ++i, ++id) {
    classes.push_back({id, "thing_" + std::to_string(i), ClassKind::kThing, id});
  }
  for (int i = 0; i < n_stuff; ++i, ++id) {
    classes.push_back({id, "stuff_" + std::to_string(i), ClassKind::kStuff, id});
  }
  return LabelSpace(std::move(classes));
}

Scene GenerateScene(const SceneSpec& spec) {
  CheckSpec(spec);
  Rng rng(spec.rng_seed);
  const LabelImage stuff = LayStuff(spec, rng);
  Scene scene;
  for (int attempt = 0; attempt < kSceneAttempts; ++attempt) {
    const std::vector<Placement> placed = PlaceThings(spec, rng);
    if (BuildScene(spec, stuff, placed, scene)) return scene;
  }
  Infeasible("could not generate distinct same-class box centers");
}

BranchOutputs Degrade(const Scene& scene, const LabelSpace& labels,
                      const DegradationSpec& spec, std::uint64_t rng_seed) {
  Rng rng(MixSeed(rng_seed));
  const int height = scene.gt.height();
  const int width = scene.gt.width();

  BranchOutputs out;
  out.logits = LogitTensor<float>(labels.size(), height, width);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const ClassId c = scene.gt_sem(y, x);
      if (c != kVoidId) out.logits(c - 1, y, x) = static_cast<float>(spec.logit_margin);
    }
  }

  if (spec.small_stuff_fragments > 0 && spec.fragment_size > 0) {
    std::vector<ClassId> absent;
    for (ClassId c : labels.stuff_ids()) {
      if (!(scene.gt_sem.array() == c).any()) absent.push_back(c);
    }
    const int fs = spec.fragment_size;
    for (int f = 0; f < spec.small_stuff_fragments && !absent.empty() &&
                    fs <= width && fs <= height;
         ++f) {
      const ClassId cls = absent[static_cast<std::size_t>(f) % absent.size()];
      for (int attempt = 0; attempt < 200; ++attempt) {
        const int x0 = static_cast<int>(rng.uniform_int(0, width - fs));
        const int y0 = static_cast<int>(rng.uniform_int(0, height - fs));
        const auto block = scene.gt_sem.block(y0, x0, fs, fs);
        const bool on_stuff = block.unaryExpr([&](ClassId c) {
                                     return c != kVoidId && labels.is_stuff(c);
                                   }).all();
        if (!on_stuff) continue;
        for (int y = y0; y < y0 + fs; ++y) {
          for (int x = x0; x < x0 + fs; ++x) {
            out.logits(cls - 1, y, x) = static_cast<float>(2.0 * spec.logit_margin);
          }
        }
        break;
      }
    }
  }

  if (spec.logit_noise_sigma > 0.0) {
    auto& m = out.logits.matrix();
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      m.data()[i] += static_cast<float>(rng.normal(0.0, spec.logit_noise_sigma));
    }
  }

  const std::vector<ClassId> things = labels.thing_ids();
  for (std::size_t i = 0; i < scene.gt_dets.size(); ++i) {
    const bool drop = rng.bernoulli(spec.drop_detection_prob);
    const bool spurious = rng.bernoulli(spec.spurious_detection_prob);
    if (!drop) {
      Detection d = scene.gt_dets[i];
      if (spec.box_jitter_sigma > 0.0) {
        d.box.x_min += rng.normal(0.0, spec.box_jitter_sigma);
        d.box.y_min += rng.normal(0.0, spec.box_jitter_sigma);
        d.box.width = std::max(1.0, d.box.width + rng.normal(0.0, spec.box_jitter_sigma));
        d.box.height = std::max(1.0, d.box.height + rng.normal(0.0, spec.box_jitter_sigma));
      }
      out.detections.push_back(d);
      out.truth.emplace_back(i);
    }
    if (spurious && !things.empty()) {
      Detection d;
      d.class_id = things[static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<std::int64_t>(things.size()) - 1))];
      const int max_w = std::max(1, width / 2);
      const int max_h = std::max(1, height / 2);
      d.box.width = static_cast<double>(rng.uniform_int(1, max_w));
      d.box.height = static_cast<double>(rng.uniform_int(1, max_h));
      d.box.x_min = rng.uniform(0.0, width - d.box.width);
      d.box.y_min = rng.uniform(0.0, height - d.box.height);
      d.score = rng.uniform01();
      const auto pos = static_cast<std::size_t>(rng.uniform_int(
          0, static_cast<std::int64_t>(out.detections.size())));
      out.detections.insert(out.detections.begin() + static_cast<std::ptrdiff_t>(pos), d);
      out.truth.insert(out.truth.begin() + static_cast<std::ptrdiff_t>(pos), std::nullopt);
    }
  }

  out.centers = scene.gt_centers;
  if (spec.offset_noise_sigma > 0.0) {
    auto& m = out.centers.tensor().matrix();
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      m.data()[i] += static_cast<float>(rng.normal(0.0, spec.offset_noise_sigma));
    }
  }
  return out;
}

std::vector<OverlapPixel> SameClassOverlapPixels(const Scene& scene) {
  std::unordered_map<SegmentId, std::size_t> det_of_segment;
  for (std::size_t i = 0; i < scene.det_segments.size(); ++i) {
    det_of_segment.emplace(scene.det_segments[i], i);
  }
  std::vector<OverlapPixel> out;
  for (int y = 0; y < scene.gt.height(); ++y) {
    for (int x = 0; x < scene.gt.width(); ++x) {
      auto it = det_of_segment.find(scene.gt.ids(y, x));
      if (it == det_of_segment.end()) continue;
      const ClassId cls = scene.gt_dets[it->second].class_id;
      int covering = 0;
      for (const auto& d : scene.gt_dets) {
        if (d.class_id == cls && d.box.contains(x, y)) ++covering;
      }
      if (covering >= 2) out.push_back({x, y, it->second});
    }
  }
  return out;
}

}  // namespace panofuse
