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

// File formats.
//
// Tensor container (.pft), little-endian throughout:
//   bytes 0-3   magic "PFT1"
//   byte  4     dtype code, 1 = IEEE-754 float32
//   byte  5     ndim
//   then        ndim x u32 dims, outermost first (C, H, W)
//   then        product(dims) float32 values, W fastest
//
// Label space JSON (COCO "categories" style):
//   {"categories": [{"id": 1, "name": "sky", "isthing": 0}, ...]}
// Category ids may be sparse; classes are ordered by id.
//
// Detections JSON: [{"category_id": 3, "bbox": [x, y, w, h], "score": 0.9}]
//
// Panoptic maps: RGB PNG with id = R + 256 G + 65536 B, plus a sidecar JSON
//   {"file_name": "...png", "segments_info": [{"id", "category_id", "area",
//    "iscrowd", "bbox"}], "labels": "<label file>"}
// A full COCO panoptic annotation file ({"annotations": [...]}) is also
// accepted on read; the entry whose file_name matches the PNG is used.

#ifndef PANOFUSE_IO_HPP_
#define PANOFUSE_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "panofuse/types.hpp"

namespace panofuse {

std::vector<std::uint8_t> EncodeTensor(const ChannelTensor<float>& tensor);
ChannelTensor<float> DecodeTensor(std::span<const std::uint8_t> bytes);

void WriteTensor(const ChannelTensor<float>& tensor,
                 const std::filesystem::path& path);
ChannelTensor<float> ReadTensor(const std::filesystem::path& path);

CenterField<float> ReadCenterField(const std::filesystem::path& path);
void WriteCenterField(const CenterField<float>& centers,
                      const std::filesystem::path& path);

nlohmann::json LabelSpaceToJson(const LabelSpace& labels);
LabelSpace LabelSpaceFromJson(const nlohmann::json& j);
LabelSpace ReadLabelSpace(const std::filesystem::path& path);
void WriteLabelSpace(const LabelSpace& labels, const std::filesystem::path& path);

/// Category ids in the file are external ids of `labels`.
nlohmann::json DetectionsToJson(std::span<const Detection> detections,
                                const LabelSpace& labels);
std::vector<Detection> DetectionsFromJson(const nlohmann::json& j,
                                          const LabelSpace& labels);
std::vector<Detection> ReadDetections(const std::filesystem::path& path,
                                      const LabelSpace& labels);
void WriteDetections(std::span<const Detection> detections,
                     const LabelSpace& labels, const std::filesystem::path& path);

SegmentImage ReadPanopticPng(const std::filesystem::path& path);
void WritePanopticPng(const SegmentImage& ids, const std::filesystem::path& path);

PanopticMap ReadPanoptic(const std::filesystem::path& png_path,
                         const std::filesystem::path& json_path,
                         const LabelSpace& labels);
void WritePanoptic(const PanopticMap& map, const std::filesystem::path& png_path,
                   const std::filesystem::path& json_path,
                   const LabelSpace& labels, const std::string& label_ref = "");

nlohmann::json ReadJsonFile(const std::filesystem::path& path);
/// Writes `j` with two-space indentation and a trailing newline.
void WriteJsonFile(const nlohmann::json& j, const std::filesystem::path& path);

std::vector<std::uint8_t> ReadBinaryFile(const std::filesystem::path& path);

}  // namespace panofuse

#endif  // PANOFUSE_IO_HPP_
