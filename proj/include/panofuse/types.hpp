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

#ifndef PANOFUSE_TYPES_HPP_
#define PANOFUSE_TYPES_HPP_

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace panofuse {

enum class ErrorCode {
  kInvalidArgument,
  kInvalidLabelSpace,
  kDimensionMismatch,
  kUnknownClass,
  kStuffDetection,
  kNonFiniteLogit,
  kMissingCenters,
  kNoStuffClasses,
  kInfeasibleSpec,
  kBadMagic,
  kUnsupportedDtype,
  kTruncatedPayload,
  kTrailingData,
  kDimOverflow,
  kMalformedJson,
  kNegativeBoxSize,
  kScoreOutOfRange,
  kIdMismatch,
  kAreaMismatch,
  kIo,
};

const char* ErrorCodeName(ErrorCode code);

/// All recoverable failures in the library are reported with this exception;
/// `code()` identifies the failure class.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

using ClassId = std::int32_t;
using SegmentId = std::uint32_t;

/// Label 0 is reserved for void / unknown pixels; real classes start at 1.
inline constexpr ClassId kVoidId = 0;

enum class ClassKind : std::uint8_t { kThing, kStuff };

struct ClassInfo {
  ClassId id = 0;
  std::string name;
  ClassKind kind = ClassKind::kStuff;
  /// Category id used in files. Equals `id` unless the label space was built
  /// from a sparse id set such as the COCO panoptic categories.
  std::int64_t external_id = 0;
};

/// Ordered class list with the things/stuff partition. Class ids are
/// contiguous from 1; channel c-1 of a logit tensor belongs to class c.
class LabelSpace {
 public:
  LabelSpace() = default;
  /// Throws kInvalidLabelSpace unless ids are exactly 1..n in order and
  /// external ids are unique. A zero external id is replaced by `id`.
  explicit LabelSpace(std::vector<ClassInfo> classes);

  /// Builds a label space from (external_id, name, kind) triples sorted by
  /// external id; internal ids are assigned 1..n in that order.
  static LabelSpace FromExternal(std::vector<ClassInfo> classes);

  int size() const { return static_cast<int>(classes_.size()); }
  const std::vector<ClassInfo>& classes() const { return classes_; }

  bool contains(ClassId id) const { return id >= 1 && id <= size(); }
  const ClassInfo& at(ClassId id) const;
  bool is_thing(ClassId id) const { return at(id).kind == ClassKind::kThing; }
  bool is_stuff(ClassId id) const { return at(id).kind == ClassKind::kStuff; }

  std::vector<ClassId> stuff_ids() const;
  std::vector<ClassId> thing_ids() const;

  std::optional<ClassId> from_external(std::int64_t external_id) const;
  std::int64_t to_external(ClassId id) const { return at(id).external_id; }

  bool operator==(const LabelSpace& other) const;

 private:
  std::vector<ClassInfo> classes_;
  std::unordered_map<std::int64_t, ClassId> by_external_;
};

/// Axis-aligned box in pixel units. Pixel (x, y) is inside iff its center
/// (x + 0.5, y + 0.5) lies in [x_min, x_min + width) x [y_min, y_min + height).
struct BoundingBox {
  double x_min = 0.0;
  double y_min = 0.0;
  double width = 0.0;
  double height = 0.0;

  bool contains(int x, int y) const {
    const double cx = x + 0.5;
    const double cy = y + 0.5;
    return x_min <= cx && cx < x_min + width && y_min <= cy &&
           cy < y_min + height;
  }

  Eigen::Vector2d center() const {
    return {x_min + width / 2.0, y_min + height / 2.0};
  }

  double area() const { return width * height; }

  bool operator==(const BoundingBox&) const = default;
};

/// Half-open pixel index range [begin, end) on one axis.
struct PixelSpan {
  int begin = 0;
  int end = 0;
  bool empty() const { return end <= begin; }
};

/// Columns / rows whose pixel centers fall inside the box, clipped to the
/// image. Agrees exactly with BoundingBox::contains.
PixelSpan ColumnSpan(const BoundingBox& box, int image_width);
PixelSpan RowSpan(const BoundingBox& box, int image_height);

struct Detection {
  ClassId class_id = 0;
  BoundingBox box;
  double score = 0.0;

  bool operator==(const Detection&) const = default;
};

/// Channel-major C x H x W tensor. Stored as a C x (H*W) row-major Eigen
/// matrix so that each channel is one contiguous row.
template <typename Scalar>
class ChannelTensor {
 public:
  using Storage =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using PlaneMap = Eigen::Map<Storage>;
  using ConstPlaneMap = Eigen::Map<const Storage>;

  ChannelTensor() = default;
  ChannelTensor(int channels, int height, int width)
      : height_(height), width_(width) {
    if (channels < 0 || height < 0 || width < 0) {
      throw Error(ErrorCode::kInvalidArgument, "negative tensor dimension");
    }
    data_.setZero(channels, static_cast<Eigen::Index>(height) * width);
  }

  int channels() const { return static_cast<int>(data_.rows()); }
  int height() const { return height_; }
  int width() const { return width_; }
  Eigen::Index pixels() const { return data_.cols(); }

  Scalar& operator()(int c, int y, int x) {
    return data_(c, static_cast<Eigen::Index>(y) * width_ + x);
  }
  Scalar operator()(int c, int y, int x) const {
    return data_(c, static_cast<Eigen::Index>(y) * width_ + x);
  }

  /// Flattened channel c (length H*W).
  auto channel(int c) { return data_.row(c); }
  auto channel(int c) const { return data_.row(c); }

  /// Channel c viewed as an H x W plane.
  PlaneMap plane(int c) { return PlaneMap(data_.row(c).data(), height_, width_); }
  ConstPlaneMap plane(int c) const {
    return ConstPlaneMap(data_.row(c).data(), height_, width_);
  }

  Storage& matrix() { return data_; }
  const Storage& matrix() const { return data_; }

  bool operator==(const ChannelTensor& other) const {
    return height_ == other.height_ && width_ == other.width_ &&
           data_.rows() == other.data_.rows() &&
           data_.cols() == other.data_.cols() && data_ == other.data_;
  }

 private:
  int height_ = 0;
  int width_ = 0;
  Storage data_;
};

template <typename Scalar>
using LogitTensor = ChannelTensor<Scalar>;

/// Per-pixel predicted offset (channel 0 = x, channel 1 = y), in pixels,
/// from the pixel center to the owning instance's box center.
template <typename Scalar>
class CenterField {
 public:
  CenterField() : offsets_(2, 0, 0) {}
  CenterField(int height, int width) : offsets_(2, height, width) {}
  explicit CenterField(ChannelTensor<Scalar> offsets)
      : offsets_(std::move(offsets)) {
    if (offsets_.channels() != 2) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "center field needs exactly 2 channels, got " +
                      std::to_string(offsets_.channels()));
    }
  }

  int height() const { return offsets_.height(); }
  int width() const { return offsets_.width(); }

  Scalar& dx(int y, int x) { return offsets_(0, y, x); }
  Scalar& dy(int y, int x) { return offsets_(1, y, x); }
  Scalar dx(int y, int x) const { return offsets_(0, y, x); }
  Scalar dy(int y, int x) const { return offsets_(1, y, x); }

  /// Predicted instance center for pixel (x, y).
  Eigen::Vector2d predicted_center(int x, int y) const {
    return {x + 0.5 + static_cast<double>(dx(y, x)),
            y + 0.5 + static_cast<double>(dy(y, x))};
  }

  const ChannelTensor<Scalar>& tensor() const { return offsets_; }
  ChannelTensor<Scalar>& tensor() { return offsets_; }

  bool operator==(const CenterField&) const = default;

 private:
  ChannelTensor<Scalar> offsets_;
};

using LabelImage =
    Eigen::Matrix<ClassId, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using SegmentImage =
    Eigen::Matrix<SegmentId, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct SegmentInfo {
  SegmentId id = 0;
  ClassId class_id = 0;
  bool is_crowd = false;
  /// Index into the detection list passed to fusion; set only for predicted
  /// thing segments.
  std::optional<std::size_t> source_detection;
  std::int64_t area = 0;

  bool operator==(const SegmentInfo&) const = default;
};

/// Non-overlapping per-pixel segment assignment; id 0 is void.
struct PanopticMap {
  SegmentImage ids;
  std::vector<SegmentInfo> segments;

  int height() const { return static_cast<int>(ids.rows()); }
  int width() const { return static_cast<int>(ids.cols()); }

  const SegmentInfo* find(SegmentId id) const;
  std::int64_t void_pixels() const;

  /// Per-pixel class ids (0 for void).
  LabelImage class_image() const;

  /// Checks the id/segment bijection and recorded areas; throws kIdMismatch
  /// or kAreaMismatch.
  void check_consistency() const;

  /// Drops segments whose area is zero.
  void drop_empty_segments();

  /// Recomputes `area` of every segment from the pixel array.
  void recount_areas();

  bool operator==(const PanopticMap& other) const {
    return ids.rows() == other.ids.rows() && ids.cols() == other.ids.cols() &&
           ids == other.ids && segments == other.segments;
  }
};

/// True when both maps induce the same partition with the same classes,
/// ignoring the numeric values of segment ids.
bool SamePartition(const PanopticMap& a, const PanopticMap& b);

}  // namespace panofuse

#endif  // PANOFUSE_TYPES_HPP_
