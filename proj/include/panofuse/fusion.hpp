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

// Parameter-free panoptic head.
//
// The instance-aware logits consist of every stuff channel followed by one
// channel per surviving detection: the detection's class slice of the
// semantic logits, restricted to its box (minus infinity elsewhere). Every
// pixel takes the first channel holding the maximum, in that channel order.
// When the winner is an instance channel, all same-class instance channels
// covering the pixel hold the same value, and the overlap policy decides
// which of those detections owns the pixel. Thing logits outside every box
// are never consulted, so undetected thing regions fall back to the best
// stuff class.
//
// Fuse() evaluates this without materializing the stacked tensor: the best
// stuff channel is reduced per tile, then each box is rasterized over it.
// FuseBruteforce() materializes the full stack and is the test oracle.

#ifndef PANOFUSE_FUSION_HPP_
#define PANOFUSE_FUSION_HPP_

#include <algorithm>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "panofuse/detail/stuff_argmax.hpp"
#include "panofuse/policies.hpp"
#include "panofuse/postprocess.hpp"
#include "panofuse/types.hpp"
#include "panofuse/validate.hpp"

namespace panofuse {

struct FusionConfig {
  double score_threshold = 0.4;
  OverlapPolicy policy = OverlapPolicy::kHighestConfidence;
  bool unknown_mode = false;
  /// 0 disables small-stuff removal.
  std::int64_t stuff_area_threshold = 0;
};

struct FusionResult {
  PanopticMap map;
  PostprocessReport report;
};

/// Detections with score >= threshold, in input order.
std::vector<Detection> FilterDetections(std::span<const Detection> detections,
                                        double threshold);

/// Input positions of the detections FilterDetections keeps.
std::vector<std::size_t> SurvivingIndices(std::span<const Detection> detections,
                                          double threshold);

namespace internal {

// Cheap structural checks shared by both fusion paths; the full value scan
// lives in ValidateInputs.
template <typename Scalar>
void CheckFusionPreconditions(const LabelSpace& labels,
                              const LogitTensor<Scalar>& logits,
                              std::span<const Detection> detections,
                              const CenterField<Scalar>* centers,
                              const FusionConfig& cfg) {
  if (logits.channels() != labels.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "logit channel count does not match the label space");
  }
  if (labels.stuff_ids().empty()) {
    throw Error(ErrorCode::kNoStuffClasses,
                "fusion needs at least one stuff class");
  }
  if (cfg.policy == OverlapPolicy::kClosestCenter && centers == nullptr) {
    throw Error(ErrorCode::kMissingCenters,
                "closest-center policy requires a center field");
  }
  if (centers != nullptr && (centers->height() != logits.height() ||
                             centers->width() != logits.width())) {
    throw Error(ErrorCode::kDimensionMismatch,
                "center field and logits differ in size");
  }
  for (std::size_t i = 0; i < detections.size(); ++i) {
    ValidateDetection(labels, detections[i], i);
  }
}

inline PolicyOrder OrderFor(OverlapPolicy policy,
                            std::span<const Detection> detections) {
  return policy == OverlapPolicy::kSmallestFirst
             ? OrderSmallestFirst(detections)
             : OrderHighestConfidence(detections);
}

}  // namespace internal

/// Unknown mode (if enabled), then small-stuff removal (if enabled).
template <typename Scalar>
FusionResult Postprocess(PanopticMap map, const LabelSpace& labels,
                         const LogitTensor<Scalar>& logits,
                         const FusionConfig& cfg) {
  FusionResult result{std::move(map), {}};
  if (cfg.unknown_mode) {
    auto [m, r] = ApplyUnknownMode(result.map, SemanticArgmax(logits), labels);
    result.map = std::move(m);
    result.report.append(r);
  }
  if (cfg.stuff_area_threshold > 0) {
    auto [m, r] = RemoveSmallStuff(result.map, labels, cfg.stuff_area_threshold);
    result.map = std::move(m);
    result.report.append(r);
  }
  return result;
}

/// Fusion without post-processing. Segment ids are assigned in channel
/// order: non-empty stuff classes by class id, then non-empty detections in
/// input order.
template <typename Scalar>
PanopticMap FuseAssign(const LabelSpace& labels,
                       const LogitTensor<Scalar>& logits,
                       std::span<const Detection> detections,
                       const CenterField<Scalar>* centers,
                       const FusionConfig& cfg) {
  internal::CheckFusionPreconditions(labels, logits, detections, centers, cfg);

  const int height = logits.height();
  const int width = logits.width();
  const Eigen::Index n_pixels = logits.pixels();
  const std::vector<ClassId> stuff = labels.stuff_ids();
  const std::vector<std::size_t> source =
      SurvivingIndices(detections, cfg.score_threshold);
  std::vector<Detection> kept;
  kept.reserve(source.size());
  for (std::size_t i : source) kept.push_back(detections[i]);

  // owner > 0: stuff class id; owner < 0: kept detection -(owner + 1).
  using ValueRow = Eigen::Array<Scalar, 1, Eigen::Dynamic>;
  using OwnerRow = Eigen::Array<std::int32_t, 1, Eigen::Dynamic>;
  ValueRow best(n_pixels);
  OwnerRow owner(n_pixels);

  constexpr Eigen::Index kTile = 4096;
  const auto& x = logits.matrix();
  std::vector<const Scalar*> rows(stuff.size());
  std::vector<Scalar> row_labels(stuff.size());
  for (std::size_t s = 0; s < stuff.size(); ++s) row_labels[s] = static_cast<Scalar>(stuff[s]);
  Eigen::Array<Scalar, 1, Eigen::Dynamic> tile_owner(std::min(kTile, n_pixels));
  for (Eigen::Index start = 0; start < n_pixels; start += kTile) {
    const Eigen::Index n = std::min(kTile, n_pixels - start);
    for (std::size_t s = 0; s < stuff.size(); ++s) {
      rows[s] = x.row(stuff[s] - 1).data() + start;
    }
    auto o = tile_owner.head(n);
    best.segment(start, n) = x.row(stuff.front() - 1).segment(start, n).array();
    o.setConstant(row_labels.front());
    detail::FoldAllRows(rows.data() + 1, row_labels.data() + 1, stuff.size() - 1,
                        best.data() + start, o.data(), n);
    owner.segment(start, n) = o.template cast<std::int32_t>();
  }

  const PolicyOrder order = internal::OrderFor(cfg.policy, kept);
  const bool closest_center = cfg.policy == OverlapPolicy::kClosestCenter;
  for (std::size_t k = 0; k < kept.size(); ++k) {
    const Detection& det = kept[k];
    const PixelSpan cols = ColumnSpan(det.box, width);
    const PixelSpan rows = RowSpan(det.box, height);
    if (cols.empty() || rows.empty()) continue;
    const Scalar* slice = x.row(det.class_id - 1).data();
    const std::int32_t code = -static_cast<std::int32_t>(k) - 1;
    for (int yy = rows.begin; yy < rows.end; ++yy) {
      const Eigen::Index row_off = static_cast<Eigen::Index>(yy) * width;
      for (int xx = cols.begin; xx < cols.end; ++xx) {
        const Eigen::Index p = row_off + xx;
        const Scalar v = slice[p];
        if (v > best[p]) {
          best[p] = v;
          owner[p] = code;
          continue;
        }
        if (v != best[p] || owner[p] >= 0) continue;
        const std::size_t current = static_cast<std::size_t>(-owner[p] - 1);
        if (kept[current].class_id != det.class_id) continue;
        // Same-class overlap; `current` always has the lower index.
        bool take;
        if (closest_center) {
          const Eigen::Vector2d q = centers->predicted_center(xx, yy);
          take = SquaredCenterDistance(q, det.box) <
                 SquaredCenterDistance(q, kept[current].box);
        } else {
          take = order.rank(k) < order.rank(current);
        }
        if (take) owner[p] = code;
      }
    }
  }

  const int n_classes = labels.size();
  const auto slot_of = [n_classes](std::int32_t o) -> std::size_t {
    return o > 0 ? static_cast<std::size_t>(o - 1)
                 : static_cast<std::size_t>(n_classes) +
                       static_cast<std::size_t>(-o - 1);
  };
  std::vector<std::int64_t> area(static_cast<std::size_t>(n_classes) + kept.size(), 0);
  for (Eigen::Index p = 0; p < n_pixels; ++p) ++area[slot_of(owner[p])];

  PanopticMap map;
  std::vector<SegmentId> id_of_slot(area.size(), 0);
  SegmentId next = 1;
  for (ClassId c : stuff) {
    const std::size_t slot = static_cast<std::size_t>(c - 1);
    if (area[slot] == 0) continue;
    id_of_slot[slot] = next;
    map.segments.push_back({next, c, false, std::nullopt, area[slot]});
    ++next;
  }
  for (std::size_t k = 0; k < kept.size(); ++k) {
    const std::size_t slot = static_cast<std::size_t>(n_classes) + k;
    if (area[slot] == 0) continue;
    id_of_slot[slot] = next;
    map.segments.push_back({next, kept[k].class_id, false, source[k], area[slot]});
    ++next;
  }
  map.ids.resize(height, width);
  SegmentId* out = map.ids.data();
  for (Eigen::Index p = 0; p < n_pixels; ++p) out[p] = id_of_slot[slot_of(owner[p])];
  return map;
}

template <typename Scalar>
FusionResult FuseDetailed(const LabelSpace& labels,
                          const LogitTensor<Scalar>& logits,
                          std::span<const Detection> detections,
                          const CenterField<Scalar>* centers,
                          const FusionConfig& cfg) {
  return Postprocess(FuseAssign(labels, logits, detections, centers, cfg),
                     labels, logits, cfg);
}

template <typename Scalar>
PanopticMap Fuse(const LabelSpace& labels, const LogitTensor<Scalar>& logits,
                 std::span<const Detection> detections,
                 const CenterField<Scalar>* centers, const FusionConfig& cfg) {
  return FuseDetailed(labels, logits, detections, centers, cfg).map;
}

/// Reference implementation: builds the dense stacked logits and runs a
/// literal per-pixel argmax. Meant for small images.
template <typename Scalar>
FusionResult FuseBruteforceDetailed(const LabelSpace& labels,
                                    const LogitTensor<Scalar>& logits,
                                    std::span<const Detection> detections,
                                    const CenterField<Scalar>* centers,
                                    const FusionConfig& cfg) {
  static_assert(std::numeric_limits<Scalar>::has_infinity);
  internal::CheckFusionPreconditions(labels, logits, detections, centers, cfg);

  const int height = logits.height();
  const int width = logits.width();
  const std::vector<ClassId> stuff = labels.stuff_ids();
  std::vector<std::size_t> source;
  std::vector<Detection> kept;
  for (std::size_t i = 0; i < detections.size(); ++i) {
    if (detections[i].score >= cfg.score_threshold) {
      source.push_back(i);
      kept.push_back(detections[i]);
    }
  }
  const std::size_t n_stuff = stuff.size();
  const std::size_t n_channels = n_stuff + kept.size();

  ChannelTensor<Scalar> stacked(static_cast<int>(n_channels), height, width);
  const Scalar minus_inf = -std::numeric_limits<Scalar>::infinity();
  for (std::size_t j = 0; j < n_stuff; ++j) {
    stacked.channel(static_cast<int>(j)) = logits.channel(stuff[j] - 1);
  }
  for (std::size_t k = 0; k < kept.size(); ++k) {
    const int ch = static_cast<int>(n_stuff + k);
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        stacked(ch, y, x) = kept[k].box.contains(x, y)
                                ? logits(kept[k].class_id - 1, y, x)
                                : minus_inf;
      }
    }
  }

  const PolicyOrder order = internal::OrderFor(cfg.policy, kept);
  // Winning channel per pixel: stuff index j < n_stuff, or n_stuff + k.
  std::vector<std::size_t> winner(static_cast<std::size_t>(height) * width);
  std::vector<std::size_t> candidates;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      std::size_t first = 0;
      for (std::size_t j = 1; j < n_channels; ++j) {
        if (stacked(static_cast<int>(j), y, x) >
            stacked(static_cast<int>(first), y, x)) {
          first = j;
        }
      }
      std::size_t chosen = first;
      if (first >= n_stuff) {
        const Scalar top = stacked(static_cast<int>(first), y, x);
        const ClassId cls = kept[first - n_stuff].class_id;
        candidates.clear();
        for (std::size_t k = 0; k < kept.size(); ++k) {
          if (kept[k].class_id == cls &&
              stacked(static_cast<int>(n_stuff + k), y, x) == top) {
            candidates.push_back(k);
          }
        }
        const std::size_t k =
            cfg.policy == OverlapPolicy::kClosestCenter
                ? AssignClosestCenter<Scalar>(x, y, candidates, kept, *centers)
                : AssignByOrder(candidates, order);
        chosen = n_stuff + k;
      }
      winner[static_cast<std::size_t>(y) * width + x] = chosen;
    }
  }

  std::vector<std::int64_t> area(n_channels, 0);
  for (std::size_t w : winner) ++area[w];
  PanopticMap map;
  std::vector<SegmentId> id_of_channel(n_channels, 0);
  SegmentId next = 1;
  for (std::size_t j = 0; j < n_channels; ++j) {
    if (area[j] == 0) continue;
    id_of_channel[j] = next;
    if (j < n_stuff) {
      map.segments.push_back({next, stuff[j], false, std::nullopt, area[j]});
    } else {
      map.segments.push_back({next, kept[j - n_stuff].class_id, false,
                              source[j - n_stuff], area[j]});
    }
    ++next;
  }
  map.ids.resize(height, width);
  for (std::size_t p = 0; p < winner.size(); ++p) {
    map.ids.data()[p] = id_of_channel[winner[p]];
  }
  return Postprocess(std::move(map), labels, logits, cfg);
}

template <typename Scalar>
PanopticMap FuseBruteforce(const LabelSpace& labels,
                           const LogitTensor<Scalar>& logits,
                           std::span<const Detection> detections,
                           const CenterField<Scalar>* centers,
                           const FusionConfig& cfg) {
  return FuseBruteforceDetailed(labels, logits, detections, centers, cfg).map;
}

extern template PanopticMap FuseAssign<float>(const LabelSpace&,
                                              const LogitTensor<float>&,
                                              std::span<const Detection>,
                                              const CenterField<float>*,
                                              const FusionConfig&);
extern template PanopticMap FuseAssign<double>(const LabelSpace&,
                                               const LogitTensor<double>&,
                                               std::span<const Detection>,
                                               const CenterField<double>*,
                                               const FusionConfig&);
extern template FusionResult FuseBruteforceDetailed<float>(
    const LabelSpace&, const LogitTensor<float>&, std::span<const Detection>,
    const CenterField<float>*, const FusionConfig&);
extern template FusionResult FuseBruteforceDetailed<double>(
    const LabelSpace&, const LogitTensor<double>&, std::span<const Detection>,
    const CenterField<double>*, const FusionConfig&);

}  // namespace panofuse

#endif  // PANOFUSE_FUSION_HPP_
