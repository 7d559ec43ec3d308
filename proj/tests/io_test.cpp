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

#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <fstream>

#include "panofuse/fusion.hpp"
#include "panofuse/io.hpp"
#include "panofuse/metrics.hpp"
#include "support/scenario.hpp"

namespace panofuse {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("panofuse_io_" + std::to_string(::testing::UnitTest::GetInstance()
                                                  ->random_seed()) +
             "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

ErrorCode DecodeError(const std::vector<std::uint8_t>& bytes) {
  try {
    DecodeTensor(bytes);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return ErrorCode::kIo;
}

std::vector<std::uint8_t> Header(std::uint8_t dtype, std::vector<std::uint32_t> dims) {
  std::vector<std::uint8_t> out = {'P', 'F', 'T', '1', dtype,
                                   static_cast<std::uint8_t>(dims.size())};
  for (std::uint32_t d : dims) {
    for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(d >> (8 * b)));
  }
  return out;
}

TEST(TensorCodec, RoundTripIsBitExact) {
  ChannelTensor<float> t(3, 2, 5);
  float v = -7.25f;
  for (Eigen::Index i = 0; i < t.matrix().size(); ++i, v += 1.125f) t.matrix().data()[i] = v;
  t(1, 1, 4) = -0.0f;
  t(2, 0, 0) = 3.4e38f;
  const auto bytes = EncodeTensor(t);
  EXPECT_EQ(bytes.size(), 6u + 12u + 30u * 4u);
  const auto back = DecodeTensor(bytes);
  EXPECT_EQ(back, t);
  EXPECT_TRUE(std::signbit(back(1, 1, 4)));
}

TEST(TensorCodec, LayoutIsLittleEndianChannelMajor) {
  ChannelTensor<float> t(2, 1, 2);
  t(0, 0, 0) = 1.0f;
  t(0, 0, 1) = 2.0f;
  t(1, 0, 0) = 3.0f;
  t(1, 0, 1) = 4.0f;
  const auto bytes = EncodeTensor(t);
  std::vector<std::uint8_t> expected = Header(1, {2, 1, 2});
  for (float f : {1.0f, 2.0f, 3.0f, 4.0f}) {
    std::uint32_t u;
    std::memcpy(&u, &f, 4);
    for (int b = 0; b < 4; ++b) expected.push_back(static_cast<std::uint8_t>(u >> (8 * b)));
  }
  EXPECT_EQ(bytes, expected);
}

TEST(TensorCodec, Errors) {
  EXPECT_EQ(DecodeError({'P', 'F'}), ErrorCode::kTruncatedPayload);
  EXPECT_EQ(DecodeError({'N', 'O', 'P', 'E', 1, 3}), ErrorCode::kBadMagic);
  EXPECT_EQ(DecodeError(Header(2, {1, 1, 1})), ErrorCode::kUnsupportedDtype);
  // 3x4x4 float32 needs 192 payload bytes.
  auto short_payload = Header(1, {3, 4, 4});
  short_payload.resize(short_payload.size() + 100);
  EXPECT_EQ(DecodeError(short_payload), ErrorCode::kTruncatedPayload);
  auto long_payload = Header(1, {1, 1, 1});
  long_payload.resize(long_payload.size() + 8);
  EXPECT_EQ(DecodeError(long_payload), ErrorCode::kTrailingData);
  EXPECT_EQ(DecodeError(Header(1, {0x7fffffff, 0x7fffffff, 0x7fffffff})),
            ErrorCode::kDimOverflow);
  EXPECT_EQ(DecodeError(Header(1, {4, 4})), ErrorCode::kDimensionMismatch);
  auto cut = Header(1, {3, 4, 4});
  cut.resize(10);
  EXPECT_EQ(DecodeError(cut), ErrorCode::kTruncatedPayload);
}

TEST(TensorFiles, CenterFieldRoundTrip) {
  TempDir dir;
  CenterField<float> c(3, 4);
  c.dx(1, 2) = 0.5f;
  c.dy(2, 3) = -4.0f;
  WriteCenterField(c, dir.path() / "c.pft");
  EXPECT_EQ(ReadCenterField(dir.path() / "c.pft").tensor(), c.tensor());
  WriteTensor(ChannelTensor<float>(3, 4, 4), dir.path() / "bad.pft");
  EXPECT_THROW(ReadCenterField(dir.path() / "bad.pft"), Error);
  EXPECT_THROW(ReadTensor(dir.path() / "missing.pft"), Error);
}

LabelSpace Coco() {
  return LabelSpace::FromExternal({{0, "person", ClassKind::kThing, 1},
                                   {0, "car", ClassKind::kThing, 3},
                                   {0, "sky", ClassKind::kStuff, 187}});
}

TEST(LabelSpaceJson, SparseIdsRoundTrip) {
  const LabelSpace labels = Coco();
  EXPECT_EQ(labels.from_external(187), 3);
  EXPECT_EQ(labels.to_external(2), 3);
  EXPECT_EQ(LabelSpaceFromJson(LabelSpaceToJson(labels)), labels);
  EXPECT_THROW(LabelSpaceFromJson(json::parse(R"({"cats": []})")), Error);
  EXPECT_THROW(LabelSpaceFromJson(json::parse(R"([{"id": 1, "name": "a"}])")), Error);
}

ErrorCode DetectionsError(const char* text) {
  try {
    DetectionsFromJson(json::parse(text), Coco());
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << text;
  return ErrorCode::kIo;
}

TEST(DetectionsJson, ExamplesAndErrors) {
  EXPECT_TRUE(DetectionsFromJson(json::parse("[]"), Coco()).empty());
  const auto dets = DetectionsFromJson(
      json::parse(R"([{"category_id": 3, "bbox": [1.5, 2, 3, 4], "score": 0.75}])"), Coco());
  ASSERT_EQ(dets.size(), 1u);
  EXPECT_EQ(dets[0], (Detection{2, {1.5, 2.0, 3.0, 4.0}, 0.75}));

  EXPECT_EQ(DetectionsError(R"([{"category_id": 1, "bbox": [0, 0, -1, 5], "score": 0.5}])"),
            ErrorCode::kNegativeBoxSize);
  EXPECT_EQ(DetectionsError(R"([{"category_id": 1, "bbox": [0, 0, 1, 0], "score": 0.5}])"),
            ErrorCode::kNegativeBoxSize);
  EXPECT_EQ(DetectionsError(R"([{"category_id": 2, "bbox": [0, 0, 1, 1], "score": 0.5}])"),
            ErrorCode::kUnknownClass);
  EXPECT_EQ(DetectionsError(R"([{"category_id": 1, "bbox": [0, 0, 1, 1], "score": 1.5}])"),
            ErrorCode::kScoreOutOfRange);
  EXPECT_EQ(DetectionsError(R"([{"category_id": 1, "bbox": [0, 0, 1], "score": 0.5}])"),
            ErrorCode::kMalformedJson);
  EXPECT_EQ(DetectionsError(R"({"category_id": 1})"), ErrorCode::kMalformedJson);
}

TEST(DetectionsJson, FileRoundTrip) {
  TempDir dir;
  const std::vector<Detection> dets = {{1, {0.25, 1.0, 3.0, 2.0}, 0.9},
                                       {2, {4.0, 4.0, 1.0, 1.0}, 0.1},
                                       {1, {0.0, 0.0, 10.0, 10.0}, 1.0}};
  WriteDetections(dets, Coco(), dir.path() / "d.json");
  EXPECT_EQ(ReadDetections(dir.path() / "d.json", Coco()), dets);
  EXPECT_EQ(ReadJsonFile(dir.path() / "d.json")[1]["category_id"], 3);
}

TEST(JsonFiles, MalformedInput) {
  TempDir dir;
  std::ofstream(dir.path() / "bad.json") << "{\"categories\": [";
  try {
    ReadLabelSpace(dir.path() / "bad.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMalformedJson);
  }
}

TEST(PanopticFiles, FusedMapRoundTrips) {
  TempDir dir;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto c = testing::MakeRandomCase(seed, 48);
    const PanopticMap map = Fuse<float>(c.labels, c.outputs.logits, c.outputs.detections,
                                        nullptr, FusionConfig{});
    WritePanoptic(map, dir.path() / "p.png", dir.path() / "p.json", c.labels, "labels.json");
    const PanopticMap back = ReadPanoptic(dir.path() / "p.png", dir.path() / "p.json", c.labels);
    EXPECT_EQ(back, map);
    EXPECT_EQ(ReadJsonFile(dir.path() / "p.json")["labels"], "labels.json");
  }
}

TEST(PanopticFiles, ConsistencyErrors) {
  TempDir dir;
  const LabelSpace labels = Coco();
  PanopticMap map;
  map.ids.resize(2, 2);
  map.ids << 7, 7, 9, 9;
  map.segments = {{7, 3, false, std::nullopt, 2}, {9, 1, false, 0, 2}};
  WritePanoptic(map, dir.path() / "p.png", dir.path() / "p.json", labels);

  json doc = ReadJsonFile(dir.path() / "p.json");
  doc["segments_info"].erase(1);
  WriteJsonFile(doc, dir.path() / "missing.json");
  try {
    ReadPanoptic(dir.path() / "p.png", dir.path() / "missing.json", labels);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIdMismatch);
  }

  doc = ReadJsonFile(dir.path() / "p.json");
  doc["segments_info"][0]["area"] = 3;
  WriteJsonFile(doc, dir.path() / "area.json");
  try {
    ReadPanoptic(dir.path() / "p.png", dir.path() / "area.json", labels);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kAreaMismatch);
  }

  doc = ReadJsonFile(dir.path() / "p.json");
  doc["segments_info"][0]["category_id"] = 2;
  WriteJsonFile(doc, dir.path() / "cls.json");
  EXPECT_THROW(ReadPanoptic(dir.path() / "p.png", dir.path() / "cls.json", labels), Error);
}

const fs::path kCoco = fs::path(PANOFUSE_FIXTURE_DIR) / "coco";

TEST(CocoFixture, ReadsSparseIdsCrowdAndVoid) {
  const LabelSpace labels = ReadLabelSpace(kCoco / "panoptic.json");
  ASSERT_EQ(labels.size(), 4);
  const PanopticMap map =
      ReadPanoptic(kCoco / "000000000139.png", kCoco / "panoptic.json", labels);
  EXPECT_EQ(map.width(), 16);
  EXPECT_EQ(map.height(), 12);
  EXPECT_EQ(map.segments.size(), 5u);
  EXPECT_EQ(map.void_pixels(), 3 + 16);
  const SegmentInfo* sky = map.find(3226956);
  ASSERT_NE(sky, nullptr);
  EXPECT_EQ(labels.to_external(sky->class_id), 187);
  const SegmentInfo* cars = map.find(513);
  ASSERT_NE(cars, nullptr);
  EXPECT_TRUE(cars->is_crowd);
  EXPECT_EQ(cars->area, 20);
}

TEST(CocoFixture, RoundTripAndSelfEvaluation) {
  TempDir dir;
  const LabelSpace labels = ReadLabelSpace(kCoco / "panoptic.json");
  const PanopticMap map =
      ReadPanoptic(kCoco / "000000000139.png", kCoco / "panoptic.json", labels);
  WritePanoptic(map, dir.path() / "000000000139.png", dir.path() / "out.json", labels);
  EXPECT_EQ(ReadPanopticPng(dir.path() / "000000000139.png"),
            ReadPanopticPng(kCoco / "000000000139.png"));
  const PanopticMap back =
      ReadPanoptic(dir.path() / "000000000139.png", dir.path() / "out.json", labels);
  EXPECT_EQ(back, map);

  // Written bbox / area agree with the original annotation.
  const json original = ReadJsonFile(kCoco / "panoptic.json")["annotations"][0]["segments_info"];
  const json written = ReadJsonFile(dir.path() / "out.json")["segments_info"];
  for (const json& s : original) {
    bool found = false;
    for (const json& w : written) {
      if (w["id"] != s["id"]) continue;
      found = true;
      EXPECT_EQ(w["bbox"], s["bbox"]);
      EXPECT_EQ(w["area"], s["area"]);
      EXPECT_EQ(w["category_id"], s["category_id"]);
      EXPECT_EQ(w["iscrowd"].get<int>(), s["iscrowd"].get<int>());
    }
    EXPECT_TRUE(found) << s["id"];
  }

  PqAccumulator acc;
  acc.add(MatchSegments(map, back, labels));
  const PqScores pq = ComputePq(acc, labels);
  EXPECT_EQ(pq.pq, 1.0);
}

}  // namespace
}  // namespace panofuse
