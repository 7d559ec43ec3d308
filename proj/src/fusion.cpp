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

#include "panofuse/fusion.hpp"

namespace panofuse {

std::vector<std::size_t> SurvivingIndices(std::span<const Detection> detections,
                                          double threshold) {
  std::vector<std::size_t> out;
  out.reserve(detections.size());
  for (std::size_t i = 0; i < detections.size(); ++i) {
    if (detections[i].score >= threshold) out.push_back(i);
  }
  return out;
}

std::vector<Detection> FilterDetections(std::span<const Detection> detections,
                                        double threshold) {
  std::vector<Detection> out;
  for (std::size_t i : SurvivingIndices(detections, threshold)) {
    out.push_back(detections[i]);
  }
  return out;
}

template PanopticMap FuseAssign<float>(const LabelSpace&,
                                       const LogitTensor<float>&,
                                       std::span<const Detection>,
                                       const CenterField<float>*,
                                       const FusionConfig&);
template PanopticMap FuseAssign<double>(const LabelSpace&,
                                        const LogitTensor<double>&,
                                        std::span<const Detection>,
                                        const CenterField<double>*,
                                        const FusionConfig&);
template FusionResult FuseBruteforceDetailed<float>(
    const LabelSpace&, const LogitTensor<float>&, std::span<const Detection>,
    const CenterField<float>*, const FusionConfig&);
template FusionResult FuseBruteforceDetailed<double>(
    const LabelSpace&, const LogitTensor<double>&, std::span<const Detection>,
    const CenterField<double>*, const FusionConfig&);

}  // namespace panofuse
