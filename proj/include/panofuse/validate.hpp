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

#ifndef PANOFUSE_VALIDATE_HPP_
#define PANOFUSE_VALIDATE_HPP_

#include <span>
#include <string>

#include "panofuse/types.hpp"

namespace panofuse {

template <typename Scalar>
struct InputBundle {
  const LabelSpace& labels;
  const LogitTensor<Scalar>& logits;
  std::span<const Detection> detections;
  const CenterField<Scalar>* centers;
};

void ValidateDetection(const LabelSpace& labels, const Detection& det,
                       std::size_t index);

/// Checks every type invariant and the mutual shape consistency of one fusion
/// input set. Returns the inputs unchanged.
template <typename Scalar>
InputBundle<Scalar> ValidateInputs(const LabelSpace& labels,
                                   const LogitTensor<Scalar>& logits,
                                   std::span<const Detection> detections,
                                   const CenterField<Scalar>* centers) {
  if (logits.channels() != labels.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "logits have " + std::to_string(logits.channels()) +
                    " channels but the label space has " +
                    std::to_string(labels.size()) + " classes");
  }
  if (centers != nullptr && (centers->height() != logits.height() ||
                             centers->width() != logits.width())) {
    throw Error(ErrorCode::kDimensionMismatch,
                "center field is " + std::to_string(centers->height()) + "x" +
                    std::to_string(centers->width()) + " but logits are " +
                    std::to_string(logits.height()) + "x" +
                    std::to_string(logits.width()));
  }
  for (std::size_t i = 0; i < detections.size(); ++i) {
    ValidateDetection(labels, detections[i], i);
  }
  if (!logits.matrix().allFinite()) {
    throw Error(ErrorCode::kNonFiniteLogit, "logits contain NaN or Inf");
  }
  if (centers != nullptr && !centers->tensor().matrix().allFinite()) {
    throw Error(ErrorCode::kInvalidArgument,
                "center offsets contain NaN or Inf");
  }
  return {labels, logits, detections, centers};
}

/// Per-pixel class id of the maximal channel; ties go to the lowest id.
template <typename Scalar>
LabelImage SemanticArgmax(const LogitTensor<Scalar>& logits) {
  LabelImage out(logits.height(), logits.width());
  if (logits.channels() == 0) {
    out.setConstant(kVoidId);
    return out;
  }
  using Row = Eigen::Array<Scalar, 1, Eigen::Dynamic>;
  using IdRow = Eigen::Array<ClassId, 1, Eigen::Dynamic>;
  Row best = logits.channel(0).array();
  IdRow arg = IdRow::Constant(best.size(), 1);
  for (int c = 1; c < logits.channels(); ++c) {
    const auto row = logits.channel(c).array();
    arg = (row > best).select(IdRow::Constant(best.size(), c + 1), arg);
    best = best.max(row);
  }
  Eigen::Map<IdRow>(out.data(), 1, out.size()) = arg;
  return out;
}

}  // namespace panofuse

#endif  // PANOFUSE_VALIDATE_HPP_
