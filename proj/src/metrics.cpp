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

#include "panofuse/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

namespace panofuse {

namespace {

constexpr int kFractionBits = 53;

std::uint64_t PairKey(SegmentId gt, SegmentId pred) {
  return (static_cast<std::uint64_t>(gt) << 32) | pred;
}

std::unordered_map<SegmentId, const SegmentInfo*> IndexSegments(
    const PanopticMap& map, const LabelSpace& labels, const char* which) {
  std::unordered_map<SegmentId, const SegmentInfo*> out;
  for (const auto& s : map.segments) {
    if (!labels.contains(s.class_id)) {
      throw Error(ErrorCode::kUnknownClass,
                  std::string(which) + " segment " + std::to_string(s.id) +
                      " has unknown class " + std::to_string(s.class_id));
    }
    out.emplace(s.id, &s);
  }
  return out;
}

}  // namespace

MatchResult MatchSegments(const PanopticMap& gt, const PanopticMap& pred,
                          const LabelSpace& labels) {
  if (gt.ids.rows() != pred.ids.rows() || gt.ids.cols() != pred.ids.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "gt and prediction differ in size");
  }
  const auto gt_segs = IndexSegments(gt, labels, "gt");
  const auto pred_segs = IndexSegments(pred, labels, "pred");

  std::unordered_map<std::uint64_t, std::int64_t> overlap;
  std::unordered_map<SegmentId, std::int64_t> gt_area;
  std::unordered_map<SegmentId, std::int64_t> pred_area;
  for (Eigen::Index i = 0; i < gt.ids.size(); ++i) {
    const SegmentId g = gt.ids.data()[i];
    const SegmentId p = pred.ids.data()[i];
    ++overlap[PairKey(g, p)];
    if (g != 0) ++gt_area[g];
    if (p != 0) ++pred_area[p];
  }
  for (const auto& [id, area] : gt_area) {
    if (!gt_segs.contains(id)) {
      throw Error(ErrorCode::kIdMismatch,
                  "gt pixel id " + std::to_string(id) + " has no segment");
    }
  }
  for (const auto& [id, area] : pred_area) {
    if (!pred_segs.contains(id)) {
      throw Error(ErrorCode::kIdMismatch,
                  "pred pixel id " + std::to_string(id) + " has no segment");
    }
  }
  auto lookup = [&](SegmentId g, SegmentId p) -> std::int64_t {
    auto it = overlap.find(PairKey(g, p));
    return it == overlap.end() ? 0 : it->second;
  };

  MatchResult result;
  std::set<SegmentId> matched_gt;
  std::set<SegmentId> matched_pred;
  for (const auto& [key, inter] : overlap) {
    const auto g = static_cast<SegmentId>(key >> 32);
    const auto p = static_cast<SegmentId>(key & 0xffffffffu);
    if (g == 0 || p == 0) continue;
    const SegmentInfo& gs = *gt_segs.at(g);
    const SegmentInfo& ps = *pred_segs.at(p);
    if (gs.is_crowd || gs.class_id != ps.class_id) continue;
    const std::int64_t uni =
        pred_area.at(p) + gt_area.at(g) - inter - lookup(0, p);
    const double iou = static_cast<double>(inter) / static_cast<double>(uni);
    if (iou > 0.5) {
      result.matches.push_back({g, p, gs.class_id, iou});
      matched_gt.insert(g);
      matched_pred.insert(p);
    }
  }
  std::sort(result.matches.begin(), result.matches.end(),
            [](const SegmentMatch& a, const SegmentMatch& b) {
              return a.gt_id < b.gt_id;
            });
  if (matched_gt.size() != result.matches.size() ||
      matched_pred.size() != result.matches.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "segment matched twice; IoU > 0.5 matching must be unique");
  }

  std::vector<SegmentId> gt_ids;
  for (const auto& [id, area] : gt_area) gt_ids.push_back(id);
  std::sort(gt_ids.begin(), gt_ids.end());
  std::map<ClassId, std::vector<SegmentId>> crowd_by_class;
  for (SegmentId g : gt_ids) {
    const SegmentInfo& gs = *gt_segs.at(g);
    if (gs.is_crowd) {
      crowd_by_class[gs.class_id].push_back(g);
    } else if (!matched_gt.contains(g)) {
      result.unmatched_gt.push_back({g, gs.class_id});
    }
  }

  std::vector<SegmentId> pred_ids;
  for (const auto& [id, area] : pred_area) pred_ids.push_back(id);
  std::sort(pred_ids.begin(), pred_ids.end());
  for (SegmentId p : pred_ids) {
    if (matched_pred.contains(p)) continue;
    const SegmentInfo& ps = *pred_segs.at(p);
    std::int64_t excused = lookup(0, p);
    if (auto it = crowd_by_class.find(ps.class_id); it != crowd_by_class.end()) {
      for (SegmentId g : it->second) excused += lookup(g, p);
    }
    const SegmentRef ref{p, ps.class_id};
    if (2 * excused > pred_area.at(p)) {
      result.ignored_pred.push_back(ref);
    } else {
      result.unmatched_pred.push_back(ref);
    }
  }
  return result;
}

void ExactSum::add(double value) {
  const double scaled = std::ldexp(value, kFractionBits);
  if (!(value >= 0.0) || scaled != std::floor(scaled) ||
      scaled > 18446744073709551615.0) {
    throw Error(ErrorCode::kInvalidArgument,
                "ExactSum only accepts non-negative values on the 2^-53 grid");
  }
  units_ += static_cast<std::uint64_t>(scaled);
}

double ExactSum::value() const {
  return std::ldexp(static_cast<double>(units_), -kFractionBits);
}

void PqAccumulator::add(const MatchResult& image) {
  for (const auto& m : image.matches) {
    ClassTally& t = per_class_[m.class_id];
    t.iou_sum.add(m.iou);
    ++t.tp;
  }
  for (const auto& g : image.unmatched_gt) ++per_class_[g.class_id].fn;
  for (const auto& p : image.unmatched_pred) ++per_class_[p.class_id].fp;
  ++images_;
}

void PqAccumulator::merge(const PqAccumulator& other) {
  for (const auto& [cls, tally] : other.per_class_) {
    ClassTally& t = per_class_[cls];
    t.iou_sum.merge(tally.iou_sum);
    t.tp += tally.tp;
    t.fp += tally.fp;
    t.fn += tally.fn;
  }
  images_ += other.images_;
}

PqAccumulator MergeAccumulators(PqAccumulator a, const PqAccumulator& b) {
  a.merge(b);
  return a;
}

PqScores ComputePq(const PqAccumulator& acc, const LabelSpace& labels) {
  PqScores scores;
  scores.images = acc.images();
  double sum_all = 0.0, sum_things = 0.0, sum_stuff = 0.0;
  int n_all = 0, n_things = 0, n_stuff = 0;
  for (const auto& [cls, t] : acc.per_class()) {
    if (t.tp + t.fp + t.fn == 0) continue;
    ClassPq c;
    c.iou_sum = t.iou_sum.value();
    c.tp = t.tp;
    c.fp = t.fp;
    c.fn = t.fn;
    const double denom = static_cast<double>(t.tp) + 0.5 * static_cast<double>(t.fp) +
                         0.5 * static_cast<double>(t.fn);
    c.pq = c.iou_sum / denom;
    c.sq = t.tp > 0 ? c.iou_sum / static_cast<double>(t.tp) : 0.0;
    c.rq = static_cast<double>(t.tp) / denom;
    scores.per_class.emplace(cls, c);
    sum_all += c.pq;
    ++n_all;
    if (labels.is_thing(cls)) {
      sum_things += c.pq;
      ++n_things;
    } else {
      sum_stuff += c.pq;
      ++n_stuff;
    }
  }
  if (n_all > 0) scores.pq = sum_all / n_all;
  if (n_things > 0) scores.pq_things = sum_things / n_things;
  if (n_stuff > 0) scores.pq_stuff = sum_stuff / n_stuff;
  return scores;
}

ConfusionAccumulator::ConfusionAccumulator(const LabelSpace& labels) {
  counts_.setZero(labels.size() + 1, labels.size() + 1);
}

void ConfusionAccumulator::add(const LabelImage& gt, const LabelImage& pred) {
  if (gt.rows() != pred.rows() || gt.cols() != pred.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "gt and prediction differ in size");
  }
  const Eigen::Index n = counts_.rows();
  for (Eigen::Index i = 0; i < gt.size(); ++i) {
    const ClassId g = gt.data()[i];
    const ClassId p = pred.data()[i];
    if (g < 0 || g >= n || p < 0 || p >= n) {
      throw Error(ErrorCode::kUnknownClass,
                  "class id outside the label space in semantic map");
    }
    if (g == kVoidId) continue;
    ++counts_(g, p);
  }
}

void ConfusionAccumulator::merge(const ConfusionAccumulator& other) {
  if (other.counts_.rows() != counts_.rows()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "confusion matrices over different label spaces");
  }
  counts_ += other.counts_;
}

std::map<ClassId, double> ConfusionAccumulator::class_iou() const {
  std::map<ClassId, double> out;
  for (Eigen::Index c = 1; c < counts_.rows(); ++c) {
    const std::int64_t tp = counts_(c, c);
    const std::int64_t gt_total = counts_.row(c).sum();
    const std::int64_t pred_total = counts_.col(c).sum();
    const std::int64_t uni = gt_total + pred_total - tp;
    if (uni == 0) continue;
    out.emplace(static_cast<ClassId>(c),
                static_cast<double>(tp) / static_cast<double>(uni));
  }
  return out;
}

std::optional<double> ConfusionAccumulator::miou() const {
  const auto ious = class_iou();
  if (ious.empty()) return std::nullopt;
  double sum = 0.0;
  for (const auto& [cls, iou] : ious) sum += iou;
  return sum / static_cast<double>(ious.size());
}

std::optional<double> ComputeMiou(const LabelImage& gt, const LabelImage& pred,
                                  const LabelSpace& labels) {
  ConfusionAccumulator acc(labels);
  acc.add(gt, pred);
  return acc.miou();
}

}  // namespace panofuse
