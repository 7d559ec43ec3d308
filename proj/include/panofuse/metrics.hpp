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

// Panoptic quality and mean IoU.
//
// Segment matching follows the COCO panoptic reference semantics: a gt and a
// predicted segment of the same class match when their IoU is strictly above
// 0.5, with predicted pixels on gt void removed from the union. Crowd gt
// segments never match and never count as false negatives. An unmatched
// prediction whose area lies more than half on gt void plus same-class crowd
// regions is ignored instead of counted as a false positive.

#ifndef PANOFUSE_METRICS_HPP_
#define PANOFUSE_METRICS_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "panofuse/types.hpp"

namespace panofuse {

struct SegmentRef {
  SegmentId id = 0;
  ClassId class_id = 0;
  bool operator==(const SegmentRef&) const = default;
};

struct SegmentMatch {
  SegmentId gt_id = 0;
  SegmentId pred_id = 0;
  ClassId class_id = 0;
  double iou = 0.0;
  bool operator==(const SegmentMatch&) const = default;
};

struct MatchResult {
  std::vector<SegmentMatch> matches;   // TP
  std::vector<SegmentRef> unmatched_gt;    // FN
  std::vector<SegmentRef> unmatched_pred;  // FP
  /// Unmatched predictions excused by void / crowd coverage.
  std::vector<SegmentRef> ignored_pred;
};

MatchResult MatchSegments(const PanopticMap& gt, const PanopticMap& pred,
                          const LabelSpace& labels);

/// Order-independent sum of values on the 2^-53 grid (every IoU in [0.5, 1]
/// lies on it), so sharded and sequential accumulation agree bit for bit.
class ExactSum {
 public:
  void add(double value);
  void merge(const ExactSum& other) { units_ += other.units_; }
  double value() const;
  bool operator==(const ExactSum&) const = default;

 private:
  unsigned __int128 units_ = 0;
};

struct ClassTally {
  ExactSum iou_sum;
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  bool operator==(const ClassTally&) const = default;
};

class PqAccumulator {
 public:
  void add(const MatchResult& image);
  void merge(const PqAccumulator& other);

  const std::map<ClassId, ClassTally>& per_class() const { return per_class_; }
  std::int64_t images() const { return images_; }

  bool operator==(const PqAccumulator&) const = default;

 private:
  std::map<ClassId, ClassTally> per_class_;
  std::int64_t images_ = 0;
};

PqAccumulator MergeAccumulators(PqAccumulator a, const PqAccumulator& b);

struct ClassPq {
  double iou_sum = 0.0;
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  double pq = 0.0;
  double sq = 0.0;
  double rq = 0.0;
};

struct PqScores {
  std::optional<double> pq;
  std::optional<double> pq_things;
  std::optional<double> pq_stuff;
  /// Only classes with tp + fp + fn > 0.
  std::map<ClassId, ClassPq> per_class;
  std::int64_t images = 0;
};

PqScores ComputePq(const PqAccumulator& acc, const LabelSpace& labels);

/// Confusion matrix over class ids (row = gt, column = prediction); gt void
/// pixels are skipped, predicted void counts against the gt class.
class ConfusionAccumulator {
 public:
  explicit ConfusionAccumulator(const LabelSpace& labels);

  void add(const LabelImage& gt, const LabelImage& pred);
  void merge(const ConfusionAccumulator& other);

  /// IoU for every class present in gt or prediction.
  std::map<ClassId, double> class_iou() const;
  std::optional<double> miou() const;

  const Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>& counts()
      const {
    return counts_;
  }

 private:
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> counts_;
};

std::optional<double> ComputeMiou(const LabelImage& gt, const LabelImage& pred,
                                  const LabelSpace& labels);

}  // namespace panofuse

#endif  // PANOFUSE_METRICS_HPP_
