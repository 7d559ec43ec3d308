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

#include "panofuse/io.hpp"

#include <bit>
#include <climits>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <set>

namespace panofuse {

namespace {

constexpr char kMagic[4] = {'P', 'F', 'T', '1'};
constexpr std::uint8_t kDtypeFloat32 = 1;

using json = nlohmann::json;

void PutU32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t GetU32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

[[noreturn]] void Malformed(const std::string& what) {
  throw Error(ErrorCode::kMalformedJson, what);
}

template <typename T>
T Field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    Malformed(where + ": missing field '" + key + "'");
  }
  const json& v = obj.at(key);
  if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) Malformed(where + ": '" + key + "' must be a string");
  } else if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean() && !v.is_number_integer()) {
      Malformed(where + ": '" + key + "' must be a boolean or 0/1");
    }
    return v.is_boolean() ? v.get<bool>() : v.get<std::int64_t>() != 0;
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) {
      Malformed(where + ": '" + key + "' must be an integer");
    }
  } else {
    if (!v.is_number()) Malformed(where + ": '" + key + "' must be a number");
  }
  return v.get<T>();
}

}  // namespace

std::vector<std::uint8_t> EncodeTensor(const ChannelTensor<float>& tensor) {
  std::vector<std::uint8_t> out;
  out.reserve(18 + static_cast<std::size_t>(tensor.matrix().size()) * 4);
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  out.push_back(kDtypeFloat32);
  out.push_back(3);
  PutU32(out, static_cast<std::uint32_t>(tensor.channels()));
  PutU32(out, static_cast<std::uint32_t>(tensor.height()));
  PutU32(out, static_cast<std::uint32_t>(tensor.width()));
  const float* data = tensor.matrix().data();
  for (Eigen::Index i = 0; i < tensor.matrix().size(); ++i) {
    PutU32(out, std::bit_cast<std::uint32_t>(data[i]));
  }
  return out;
}

ChannelTensor<float> DecodeTensor(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4) {
    throw Error(ErrorCode::kTruncatedPayload, "file shorter than the magic");
  }
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw Error(ErrorCode::kBadMagic, "expected magic PFT1");
  }
  if (bytes.size() < 6) {
    throw Error(ErrorCode::kTruncatedPayload, "header truncated");
  }
  if (bytes[4] != kDtypeFloat32) {
    throw Error(ErrorCode::kUnsupportedDtype,
                "dtype code " + std::to_string(bytes[4]) + " (only 1 = float32)");
  }
  const std::size_t ndim = bytes[5];
  const std::size_t header = 6 + 4 * ndim;
  if (bytes.size() < header) {
    throw Error(ErrorCode::kTruncatedPayload, "dimension list truncated");
  }
  std::vector<std::uint32_t> dims(ndim);
  std::uint64_t count = 1;
  for (std::size_t i = 0; i < ndim; ++i) {
    dims[i] = GetU32(bytes.data() + 6 + 4 * i);
    if (dims[i] > static_cast<std::uint32_t>(INT_MAX) ||
        (dims[i] != 0 && count > (UINT64_MAX / 4) / dims[i])) {
      throw Error(ErrorCode::kDimOverflow, "tensor dimensions overflow");
    }
    count *= dims[i];
  }
  if (ndim != 3) {
    throw Error(ErrorCode::kDimensionMismatch,
                "expected a 3-d tensor, got ndim " + std::to_string(ndim));
  }
  const std::uint64_t need = count * 4;
  const std::uint64_t have = bytes.size() - header;
  if (have < need) {
    throw Error(ErrorCode::kTruncatedPayload,
                "payload has " + std::to_string(have) + " bytes, need " +
                    std::to_string(need));
  }
  if (have > need) {
    throw Error(ErrorCode::kTrailingData,
                std::to_string(have - need) + " bytes after the payload");
  }
  ChannelTensor<float> t(static_cast<int>(dims[0]), static_cast<int>(dims[1]),
                         static_cast<int>(dims[2]));
  float* data = t.matrix().data();
  const std::uint8_t* p = bytes.data() + header;
  for (std::uint64_t i = 0; i < count; ++i, p += 4) {
    data[i] = std::bit_cast<float>(GetU32(p));
  }
  return t;
}

std::vector<std::uint8_t> ReadBinaryFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void WriteTensor(const ChannelTensor<float>& tensor,
                 const std::filesystem::path& path) {
  const auto bytes = EncodeTensor(tensor);
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
}

ChannelTensor<float> ReadTensor(const std::filesystem::path& path) {
  return DecodeTensor(ReadBinaryFile(path));
}

CenterField<float> ReadCenterField(const std::filesystem::path& path) {
  return CenterField<float>(ReadTensor(path));
}

void WriteCenterField(const CenterField<float>& centers,
                      const std::filesystem::path& path) {
  WriteTensor(centers.tensor(), path);
}

json ReadJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    Malformed(path.string() + ": " + e.what());
  }
}

void WriteJsonFile(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
}

json LabelSpaceToJson(const LabelSpace& labels) {
  json cats = json::array();
  for (const auto& c : labels.classes()) {
    cats.push_back({{"id", c.external_id},
                    {"name", c.name},
                    {"isthing", c.kind == ClassKind::kThing ? 1 : 0}});
  }
  return {{"categories", cats}};
}

LabelSpace LabelSpaceFromJson(const json& j) {
  const json* cats = &j;
  if (j.is_object()) {
    if (!j.contains("categories")) Malformed("label space: missing 'categories'");
    cats = &j.at("categories");
  }
  if (!cats->is_array()) Malformed("label space: 'categories' must be an array");
  std::vector<ClassInfo> classes;
  for (std::size_t i = 0; i < cats->size(); ++i) {
    const json& c = (*cats)[i];
    const std::string where = "category " + std::to_string(i);
    ClassInfo info;
    info.external_id = Field<std::int64_t>(c, "id", where);
    info.name = Field<std::string>(c, "name", where);
    info.kind = Field<bool>(c, "isthing", where) ? ClassKind::kThing
                                                  : ClassKind::kStuff;
    classes.push_back(std::move(info));
  }
  return LabelSpace::FromExternal(std::move(classes));
}

LabelSpace ReadLabelSpace(const std::filesystem::path& path) {
  return LabelSpaceFromJson(ReadJsonFile(path));
}

void WriteLabelSpace(const LabelSpace& labels, const std::filesystem::path& path) {
  WriteJsonFile(LabelSpaceToJson(labels), path);
}

json DetectionsToJson(std::span<const Detection> detections,
                      const LabelSpace& labels) {
  json arr = json::array();
  for (const auto& d : detections) {
    arr.push_back({{"category_id", labels.to_external(d.class_id)},
                   {"bbox", {d.box.x_min, d.box.y_min, d.box.width, d.box.height}},
                   {"score", d.score}});
  }
  return arr;
}

std::vector<Detection> DetectionsFromJson(const json& j, const LabelSpace& labels) {
  if (!j.is_array()) Malformed("detections must be a JSON array");
  std::vector<Detection> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    const json& e = j[i];
    const std::string where = "detection " + std::to_string(i);
    const auto ext = Field<std::int64_t>(e, "category_id", where);
    const auto cls = labels.from_external(ext);
    if (!cls) {
      throw Error(ErrorCode::kUnknownClass,
                  where + ": unknown category_id " + std::to_string(ext));
    }
    if (!e.contains("bbox") || !e.at("bbox").is_array() || e.at("bbox").size() != 4) {
      Malformed(where + ": 'bbox' must be [x, y, w, h]");
    }
    double b[4];
    for (std::size_t k = 0; k < 4; ++k) {
      if (!e.at("bbox")[k].is_number()) Malformed(where + ": non-numeric bbox");
      b[k] = e.at("bbox")[k].get<double>();
    }
    if (!(b[2] > 0.0) || !(b[3] > 0.0)) {
      throw Error(ErrorCode::kNegativeBoxSize,
                  where + ": box width and height must be positive");
    }
    const double score = Field<double>(e, "score", where);
    if (!(score >= 0.0 && score <= 1.0)) {
      throw Error(ErrorCode::kScoreOutOfRange,
                  where + ": score " + std::to_string(score) + " outside [0, 1]");
    }
    out.push_back({*cls, {b[0], b[1], b[2], b[3]}, score});
  }
  return out;
}

std::vector<Detection> ReadDetections(const std::filesystem::path& path,
                                      const LabelSpace& labels) {
  return DetectionsFromJson(ReadJsonFile(path), labels);
}

void WriteDetections(std::span<const Detection> detections,
                     const LabelSpace& labels, const std::filesystem::path& path) {
  WriteJsonFile(DetectionsToJson(detections, labels), path);
}

PanopticMap ReadPanoptic(const std::filesystem::path& png_path,
                         const std::filesystem::path& json_path,
                         const LabelSpace& labels) {
  const json doc = ReadJsonFile(json_path);
  const json* ann = &doc;
  if (doc.is_object() && doc.contains("annotations")) {
    const json& all = doc.at("annotations");
    if (!all.is_array()) Malformed("'annotations' must be an array");
    const std::string name = png_path.filename().string();
    ann = nullptr;
    for (const json& a : all) {
      if (a.is_object() && a.contains("file_name") && a.at("file_name") == name) {
        ann = &a;
        break;
      }
    }
    if (ann == nullptr && all.size() == 1) ann = &all[0];
    if (ann == nullptr) {
      throw Error(ErrorCode::kIdMismatch, "no annotation for " + name + " in " +
                                              json_path.string());
    }
  }
  if (!ann->is_object() || !ann->contains("segments_info") ||
      !ann->at("segments_info").is_array()) {
    Malformed(json_path.string() + ": missing 'segments_info' array");
  }

  PanopticMap map;
  map.ids = ReadPanopticPng(png_path);
  for (const json& s : ann->at("segments_info")) {
    const std::string where = "segment";
    SegmentInfo info;
    const auto id = Field<std::int64_t>(s, "id", where);
    if (id <= 0 || id > 0xffffff) {
      throw Error(ErrorCode::kIdMismatch,
                  "segment id " + std::to_string(id) + " outside the RGB range");
    }
    info.id = static_cast<SegmentId>(id);
    const auto ext = Field<std::int64_t>(s, "category_id", where);
    const auto cls = labels.from_external(ext);
    if (!cls) {
      throw Error(ErrorCode::kUnknownClass,
                  "segment " + std::to_string(id) + ": unknown category_id " +
                      std::to_string(ext));
    }
    info.class_id = *cls;
    info.area = Field<std::int64_t>(s, "area", where);
    info.is_crowd = s.contains("iscrowd") ? Field<bool>(s, "iscrowd", where) : false;
    if (s.contains("source_detection") && !s.at("source_detection").is_null()) {
      info.source_detection = Field<std::size_t>(s, "source_detection", where);
    }
    map.segments.push_back(info);
  }
  map.check_consistency();
  return map;
}

void WritePanoptic(const PanopticMap& map, const std::filesystem::path& png_path,
                   const std::filesystem::path& json_path,
                   const LabelSpace& labels, const std::string& label_ref) {
  map.check_consistency();
  struct Extent {
    int min_x = INT_MAX, min_y = INT_MAX, max_x = -1, max_y = -1;
  };
  std::map<SegmentId, Extent> extent;
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      const SegmentId id = map.ids(y, x);
      if (id == 0) continue;
      Extent& e = extent[id];
      e.min_x = std::min(e.min_x, x);
      e.min_y = std::min(e.min_y, y);
      e.max_x = std::max(e.max_x, x);
      e.max_y = std::max(e.max_y, y);
    }
  }
  json segs = json::array();
  for (const auto& s : map.segments) {
    if (s.id > 0xffffff) {
      throw Error(ErrorCode::kIdMismatch,
                  "segment id " + std::to_string(s.id) + " exceeds 24 bits");
    }
    const Extent& e = extent.at(s.id);
    json entry = {{"id", s.id},
                  {"category_id", labels.to_external(s.class_id)},
                  {"area", s.area},
                  {"iscrowd", s.is_crowd ? 1 : 0},
                  {"bbox", {e.min_x, e.min_y, e.max_x - e.min_x + 1, e.max_y - e.min_y + 1}}};
    if (s.source_detection) entry["source_detection"] = *s.source_detection;
    segs.push_back(std::move(entry));
  }
  json doc = {{"file_name", png_path.filename().string()}, {"segments_info", segs}};
  if (!label_ref.empty()) doc["labels"] = label_ref;
  WritePanopticPng(map.ids, png_path);
  WriteJsonFile(doc, json_path);
}

}  // namespace panofuse
