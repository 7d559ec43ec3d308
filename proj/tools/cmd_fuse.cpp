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

#include <iostream>
#include <memory>
#include <optional>

#include "cli_common.hpp"
#include "commands.hpp"
#include "panofuse/fusion.hpp"
#include "panofuse/io.hpp"

namespace panofuse::cli {

namespace {

struct FuseOptions {
  std::string labels;
  std::string logits;
  std::string detections;
  std::string centers;
  std::string policy = "hc";
  double score_threshold = 0.4;
  bool unknown_mode = false;
  std::int64_t stuff_area_threshold = 0;
  std::string out_prefix;
};

int RunFuse(const FuseOptions& o) {
  FusionConfig cfg;
  cfg.policy = *ParsePolicy(o.policy);
  cfg.score_threshold = o.score_threshold;
  cfg.unknown_mode = o.unknown_mode;
  cfg.stuff_area_threshold = o.stuff_area_threshold;
  if (cfg.policy == OverlapPolicy::kClosestCenter && o.centers.empty()) {
    throw UsageError("--policy cc requires --centers");
  }

  Manifest manifest;
  manifest.command = "fuse";
  manifest.config = {{"policy", o.policy},
                     {"score_threshold", o.score_threshold},
                     {"unknown_mode", o.unknown_mode},
                     {"stuff_area_threshold", o.stuff_area_threshold},
                     {"out_prefix", o.out_prefix}};

  Stopwatch clock;
  const LabelSpace labels = ReadLabelSpace(o.labels);
  const LogitTensor<float> logits = ReadTensor(o.logits);
  const std::vector<Detection> dets = ReadDetections(o.detections, labels);
  std::optional<CenterField<float>> centers;
  if (!o.centers.empty()) centers = ReadCenterField(o.centers);
  const CenterField<float>* centers_ptr = centers ? &*centers : nullptr;
  ValidateInputs(labels, logits, dets, centers_ptr);
  manifest.timings_us["read"] = clock.lap_us();

  PanopticMap map = FuseAssign(labels, logits, dets, centers_ptr, cfg);
  manifest.timings_us["fuse"] = clock.lap_us();
  FusionResult result = Postprocess(std::move(map), labels, logits, cfg);
  manifest.timings_us["postprocess"] = clock.lap_us();

  const std::filesystem::path prefix(o.out_prefix);
  if (prefix.has_parent_path()) std::filesystem::create_directories(prefix.parent_path());
  const std::string png = o.out_prefix + ".png";
  const std::string json = o.out_prefix + ".json";
  WritePanoptic(result.map, png, json, labels, o.labels);
  manifest.timings_us["write"] = clock.lap_us();

  manifest.add_input("labels", o.labels);
  manifest.add_input("logits", o.logits);
  manifest.add_input("detections", o.detections);
  if (!o.centers.empty()) manifest.add_input("centers", o.centers);
  manifest.outputs = {png, json};
  nlohmann::json doc = manifest.to_json();
  nlohmann::json removed = nlohmann::json::array();
  for (const auto& r : result.report.stuff_segments_removed) {
    removed.push_back({{"category_id", labels.to_external(r.class_id)}, {"area", r.area}});
  }
  doc["postprocess"] = {{"pixels_voided_unknown", result.report.pixels_voided_unknown},
                        {"stuff_segments_removed", removed}};
  WriteJsonFile(doc, o.out_prefix + ".manifest.json");

  std::cout << "fused " << logits.height() << "x" << logits.width() << ", "
            << dets.size() << " detections -> " << result.map.segments.size()
            << " segments (" << png << ")\n";
  return kExitOk;
}

}  // namespace

void RegisterFuse(CLI::App& app, Runner& run) {
  auto o = std::make_shared<FuseOptions>();
  CLI::App* sub = app.add_subcommand("fuse", "Fuse semantic logits and detections into a panoptic map");
  sub->add_option("--labels", o->labels, "Label space JSON")->required()->check(CLI::ExistingFile);
  sub->add_option("--logits", o->logits, "Semantic logits tensor (.pft)")->required()->check(CLI::ExistingFile);
  sub->add_option("--detections", o->detections, "Detections JSON")->required()->check(CLI::ExistingFile);
  sub->add_option("--centers", o->centers, "Center offset field (.pft)")->check(CLI::ExistingFile);
  sub->add_option("--policy", o->policy, "Same-class overlap policy")
      ->check(CLI::IsMember({"hc", "sf", "cc"}))
      ->capture_default_str();
  sub->add_option("--score-threshold", o->score_threshold, "Minimum detection score")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  sub->add_flag("--unknown-mode", o->unknown_mode, "Void stuff pixels whose semantic argmax is a thing");
  sub->add_option("--stuff-area-threshold", o->stuff_area_threshold,
                  "Remove stuff segments with fewer pixels (0 = off)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  sub->add_option("--out-prefix", o->out_prefix, "Writes PREFIX.png, PREFIX.json, PREFIX.manifest.json")
      ->required();
  sub->callback([o, &run] { run = [o] { return RunFuse(*o); }; });
}

}  // namespace panofuse::cli
