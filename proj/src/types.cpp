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

#include "panofuse/types.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

namespace panofuse {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kInvalidLabelSpace: return "InvalidLabelSpace";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kUnknownClass: return "UnknownClass";
    case ErrorCode::kStuffDetection: return "StuffDetection";
    case ErrorCode::kNonFiniteLogit: return "NonFiniteLogit";
    case ErrorCode::kMissingCenters: return "MissingCenters";
    case ErrorCode::kNoStuffClasses: return "NoStuffClasses";
    case ErrorCode::kInfeasibleSpec: return "InfeasibleSpec";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kUnsupportedDtype: return "UnsupportedDtype";
    case ErrorCode::kTruncatedPayload: return "TruncatedPayload";
    case ErrorCode::kTrailingData: return "TrailingData";
    case ErrorCode::kDimOverflow: return "DimOverflow";
    case ErrorCode::kMalformedJson: return "MalformedJson";
    case ErrorCode::kNegativeBoxSize: return "NegativeBoxSize";
    case ErrorCode::kScoreOutOfRange: return "ScoreOutOfRange";
    case ErrorCode::kIdMismatch: return "IdMismatch";
    case ErrorCode::kAreaMismatch: return "AreaMismatch";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

LabelSpace::LabelSpace(std::vector<ClassInfo> classes)
    : classes_(std::move(classes)) {
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    ClassInfo& info = classes_[i];
    if (info.id != static_cast<ClassId>(i + 1)) {
      throw Error(ErrorCode::kInvalidLabelSpace,
                  "class ids must be contiguous from 1; position " +
                      std::to_string(i) + " has id " + std::to_string(info.id));
    }
    if (info.external_id == 0) info.external_id = info.id;
    if (!by_external_.emplace(info.external_id, info.id).second) {
      throw Error(ErrorCode::kInvalidLabelSpace,
                  "duplicate category id " + std::to_string(info.external_id));
    }
  }
}

LabelSpace LabelSpace::FromExternal(std::vector<ClassInfo> classes) {
  std::sort(classes.begin(), classes.end(),
            [](const ClassInfo& a, const ClassInfo& b) {
              return a.external_id < b.external_id;
            });
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (classes[i].external_id <= 0) {
      throw Error(ErrorCode::kInvalidLabelSpace,
                  "category ids must be positive");
    }
    classes[i].id = static_cast<ClassId>(i + 1);
  }
  return LabelSpace(std::move(classes));
}

const ClassInfo& LabelSpace::at(ClassId id) const {
  if (!contains(id)) {
    throw Error(ErrorCode::kUnknownClass,
                "class id " + std::to_string(id) + " not in label space");
  }
  return classes_[static_cast<std::size_t>(id - 1)];
}

std::vector<ClassId> LabelSpace::stuff_ids() const {
  std::vector<ClassId> out;
  for (const auto& c : classes_) {
    if (c.kind == ClassKind::kStuff) out.push_back(c.id);
  }
  return out;
}

std::vector<ClassId> LabelSpace::thing_ids() const {
  std::vector<ClassId> out;
  for (const auto& c : classes_) {
    if (c.kind == ClassKind::kThing) out.push_back(c.id);
  }
  return out;
}

std::optional<ClassId> LabelSpace::from_external(std::int64_t external_id) const {
  auto it = by_external_.find(external_id);
  if (it == by_external_.end()) return std::nullopt;
  return it->second;
}

bool LabelSpace::operator==(const LabelSpace& other) const {
  if (classes_.size() != other.classes_.size()) return false;
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    const auto& a = classes_[i];
    const auto& b = other.classes_[i];
    if (a.id != b.id || a.name != b.name || a.kind != b.kind ||
        a.external_id != b.external_id) {
      return false;
    }
  }
  return true;
}

namespace {

// First index i in [0, extent) with lo <= i + 0.5, then walked so that the
// result agrees with the floating-point containment predicate exactly.
PixelSpan AxisSpan(double lo, double size, int extent) {
  const double hi = lo + size;
  auto inside = [&](int i) {
    const double c = i + 0.5;
    return lo <= c && c < hi;
  };
  if (!(size > 0.0) || extent <= 0) return {0, 0};
  double first = std::ceil(lo - 0.5);
  double last = std::ceil(hi - 0.5);  // exclusive
  first = std::clamp(first, 0.0, static_cast<double>(extent));
  last = std::clamp(last, 0.0, static_cast<double>(extent));
  int begin = static_cast<int>(first);
  int end = static_cast<int>(last);
  while (begin > 0 && inside(begin - 1)) --begin;
  while (begin < end && !inside(begin)) ++begin;
  while (end < extent && inside(end)) ++end;
  while (end > begin && !inside(end - 1)) --end;
  if (end < begin) end = begin;
  return {begin, end};
}

}  // namespace

PixelSpan ColumnSpan(const BoundingBox& box, int image_width) {
  return AxisSpan(box.x_min, box.width, image_width);
}

PixelSpan RowSpan(const BoundingBox& box, int image_height) {
  return AxisSpan(box.y_min, box.height, image_height);
}

const SegmentInfo* PanopticMap::find(SegmentId id) const {
  for (const auto& s : segments) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

std::int64_t PanopticMap::void_pixels() const {
  return (ids.array() == 0u).count();
}

LabelImage PanopticMap::class_image() const {
  std::unordered_map<SegmentId, ClassId> lut;
  for (const auto& s : segments) lut.emplace(s.id, s.class_id);
  LabelImage out(ids.rows(), ids.cols());
  for (Eigen::Index i = 0; i < ids.size(); ++i) {
    const SegmentId id = ids.data()[i];
    if (id == 0) {
      out.data()[i] = kVoidId;
      continue;
    }
    auto it = lut.find(id);
    out.data()[i] = it == lut.end() ? kVoidId : it->second;
  }
  return out;
}

void PanopticMap::check_consistency() const {
  std::map<SegmentId, std::int64_t> counts;
  for (Eigen::Index i = 0; i < ids.size(); ++i) {
    const SegmentId id = ids.data()[i];
    if (id != 0) ++counts[id];
  }
  std::map<SegmentId, const SegmentInfo*> listed;
  for (const auto& s : segments) {
    if (s.id == 0) {
      throw Error(ErrorCode::kIdMismatch, "segment list contains id 0");
    }
    if (!listed.emplace(s.id, &s).second) {
      throw Error(ErrorCode::kIdMismatch,
                  "segment id " + std::to_string(s.id) + " listed twice");
    }
  }
  for (const auto& [id, count] : counts) {
    auto it = listed.find(id);
    if (it == listed.end()) {
      throw Error(ErrorCode::kIdMismatch, "pixel id " + std::to_string(id) +
                                              " has no segment entry");
    }
    if (it->second->area != count) {
      throw Error(ErrorCode::kAreaMismatch,
                  "segment " + std::to_string(id) + " records area " +
                      std::to_string(it->second->area) + " but covers " +
                      std::to_string(count) + " pixels");
    }
  }
  for (const auto& [id, info] : listed) {
    if (!counts.contains(id)) {
      throw Error(ErrorCode::kIdMismatch, "segment " + std::to_string(id) +
                                              " does not occur in the image");
    }
  }
}

void PanopticMap::drop_empty_segments() {
  std::erase_if(segments, [](const SegmentInfo& s) { return s.area == 0; });
}

void PanopticMap::recount_areas() {
  std::unordered_map<SegmentId, std::int64_t> counts;
  for (Eigen::Index i = 0; i < ids.size(); ++i) {
    const SegmentId id = ids.data()[i];
    if (id != 0) ++counts[id];
  }
  for (auto& s : segments) {
    auto it = counts.find(s.id);
    s.area = it == counts.end() ? 0 : it->second;
  }
}

bool SamePartition(const PanopticMap& a, const PanopticMap& b) {
  if (a.ids.rows() != b.ids.rows() || a.ids.cols() != b.ids.cols()) {
    return false;
  }
  std::unordered_map<SegmentId, SegmentId> forward;
  std::unordered_map<SegmentId, SegmentId> backward;
  for (Eigen::Index i = 0; i < a.ids.size(); ++i) {
    const SegmentId ia = a.ids.data()[i];
    const SegmentId ib = b.ids.data()[i];
    if ((ia == 0) != (ib == 0)) return false;
    if (ia == 0) continue;
    auto [fit, fnew] = forward.emplace(ia, ib);
    if (!fnew && fit->second != ib) return false;
    auto [bit, bnew] = backward.emplace(ib, ia);
    if (!bnew && bit->second != ia) return false;
  }
  for (const auto& [ia, ib] : forward) {
    const SegmentInfo* sa = a.find(ia);
    const SegmentInfo* sb = b.find(ib);
    if (sa == nullptr || sb == nullptr || sa->class_id != sb->class_id) {
      return false;
    }
  }
  return true;
}

}  // namespace panofuse
