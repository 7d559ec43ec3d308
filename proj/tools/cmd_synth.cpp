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

// Scene spec file:
//   {"width": 64, "height": 64,
//    "labels": {"things": 6, "stuff": 6} | "labels.json" | {"categories": [...]},
//    "n_things": 4, "thing_size_range": [8, 24],
//    "allow_same_class_overlap": false,
//    "stuff_layout": "bands" | "voronoi", "stuff_regions": 3,
//    "degradation": {"logit_noise_sigma": 0, "logit_margin": 4, ...}}
// Every key is optional; unknown keys are rejected.

#include <charconv>
#include <cstdio>
#include <iostream>
#include <memory>
#include <set>

#include "cli_common.hpp"
#include "commands.hpp"
#include "panofuse/io.hpp"
#include "panofuse/synth.hpp"

namespace panofuse::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct SynthOptions {
  std::string spec;
  std::string seeds;
  std::string out_dir;
};

struct SynthPlan {
  SceneSpec scene;
  DegradationSpec degradation;
};

void CheckKeys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw UsageError(where + " must be a JSON object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) throw UsageError(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
void Read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw UsageError(where + ": '" + key + "' has the wrong type");
  }
}

LabelSpace PlanLabels(const json& j, const fs::path& spec_path) {
  if (j.is_string()) {
    return ReadLabelSpace(spec_path.parent_path() / j.get<std::string>());
  }
  if (j.is_object() && j.contains("categories")) return LabelSpaceFromJson(j);
  CheckKeys(j, {"things", "stuff"}, "labels");
  int things = 6, stuff = 6;
  Read(j, "things", things, "labels");
  Read(j, "stuff", stuff, "labels");
  if (things < 0 || stuff < 1) throw UsageError("labels: need things >= 0 and stuff >= 1");
  return MakeSyntheticLabels(things, stuff);
}

SynthPlan ParsePlan(const fs::path& path) {
  json doc;
  try {
    doc = ReadJsonFile(path);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  CheckKeys(doc,
            {"width", "height", "labels", "n_things", "thing_size_range",
             "allow_same_class_overlap", "stuff_layout", "stuff_regions", "degradation"},
            "spec");
  SynthPlan plan;
  SceneSpec& s = plan.scene;
  s.labels = PlanLabels(doc.value("labels", json::object()), path);
  Read(doc, "width", s.width, "spec");
  Read(doc, "height", s.height, "spec");
  Read(doc, "n_things", s.n_things, "spec");
  if (doc.contains("thing_size_range")) {
    std::vector<int> range;
    Read(doc, "thing_size_range", range, "spec");
    if (range.size() != 2) throw UsageError("spec: thing_size_range must be [min, max]");
    s.thing_size_min = range[0];
    s.thing_size_max = range[1];
  }
  Read(doc, "allow_same_class_overlap", s.allow_same_class_overlap, "spec");
  if (doc.contains("stuff_layout")) {
    std::string name;
    Read(doc, "stuff_layout", name, "spec");
    const auto layout = ParseStuffLayout(name);
    if (!layout) throw UsageError("spec: stuff_layout must be 'bands' or 'voronoi'");
    s.stuff_layout = *layout;
  }
  s.stuff_regions = std::min<int>(3, static_cast<int>(s.labels.stuff_ids().size()));
  Read(doc, "stuff_regions", s.stuff_regions, "spec");

  DegradationSpec& d = plan.degradation;
  if (doc.contains("degradation")) {
    const json& dj = doc.at("degradation");
    const std::string where = "degradation";
    CheckKeys(dj,
              {"logit_noise_sigma", "logit_margin", "drop_detection_prob",
               "spurious_detection_prob", "box_jitter_sigma", "offset_noise_sigma",
               "small_stuff_fragments", "fragment_size"},
              where);
    Read(dj, "logit_noise_sigma", d.logit_noise_sigma, where);
    Read(dj, "logit_margin", d.logit_margin, where);
    Read(dj, "drop_detection_prob", d.drop_detection_prob, where);
    Read(dj, "spurious_detection_prob", d.spurious_detection_prob, where);
    Read(dj, "box_jitter_sigma", d.box_jitter_sigma, where);
    Read(dj, "offset_noise_sigma", d.offset_noise_sigma, where);
    Read(dj, "small_stuff_fragments", d.small_stuff_fragments, where);
    Read(dj, "fragment_size", d.fragment_size, where);
  }
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!(d.logit_margin > 0.0) || !(d.logit_noise_sigma >= 0.0) ||
      !(d.box_jitter_sigma >= 0.0) || !(d.offset_noise_sigma >= 0.0) ||
      !prob(d.drop_detection_prob) || !prob(d.spurious_detection_prob) ||
      d.small_stuff_fragments < 0 || d.fragment_size < 1) {
    throw UsageError(
        "degradation: need margin > 0, sigmas >= 0, probabilities in [0, 1], "
        "fragments >= 0 and fragment_size >= 1");
  }
  return plan;
}

std::pair<std::uint64_t, std::uint64_t> ParseSeeds(const std::string& text) {
  auto number = [&](std::string_view part) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc() || ptr != part.data() + part.size() || part.empty()) {
      throw UsageError("--seeds must look like A..B or A, got '" + text + "'");
    }
    return v;
  };
  const auto dots = text.find("..");
  if (dots == std::string::npos) {
    const auto v = number(text);
    return {v, v};
  }
  const auto a = number(std::string_view(text).substr(0, dots));
  const auto b = number(std::string_view(text).substr(dots + 2));
  if (b < a) throw UsageError("--seeds: empty range " + text);
  return {a, b};
}

json SpecEcho(const SynthPlan& plan) {
  const SceneSpec& s = plan.scene;
  const DegradationSpec& d = plan.degradation;
  return {{"width", s.width},
          {"height", s.height},
          {"n_things", s.n_things},
          {"thing_size_range", {s.thing_size_min, s.thing_size_max}},
          {"allow_same_class_overlap", s.allow_same_class_overlap},
          {"stuff_layout", StuffLayoutName(s.stuff_layout)},
          {"stuff_regions", s.stuff_regions},
          {"degradation",
           {{"logit_noise_sigma", d.logit_noise_sigma},
            {"logit_margin", d.logit_margin},
            {"drop_detection_prob", d.drop_detection_prob},
            {"spurious_detection_prob", d.spurious_detection_prob},
            {"box_jitter_sigma", d.box_jitter_sigma},
            {"offset_noise_sigma", d.offset_noise_sigma},
            {"small_stuff_fragments", d.small_stuff_fragments},
            {"fragment_size", d.fragment_size}}}};
}

std::string SeedDirName(std::uint64_t seed) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "seed_%05llu", static_cast<unsigned long long>(seed));
  return buf;
}

void WriteSeed(const SynthPlan& plan, std::uint64_t seed, const fs::path& dir) {
  SceneSpec spec = plan.scene;
  spec.rng_seed = seed;
  const Scene scene = GenerateScene(spec);
  const BranchOutputs out = Degrade(scene, spec.labels, plan.degradation, seed);

  fs::create_directories(dir);
  WriteLabelSpace(spec.labels, dir / "labels.json");
  WriteTensor(out.logits, dir / "logits.pft");
  WriteCenterField(out.centers, dir / "centers.pft");
  WriteDetections(out.detections, spec.labels, dir / "detections.json");
  WritePanoptic(scene.gt, dir / "panoptic.png", dir / "panoptic.json", spec.labels,
                "labels.json");
  json truth = json::array();
  for (const auto& t : out.truth) truth.push_back(t ? json(*t) : json(nullptr));
  json segments = json::array();
  for (SegmentId id : scene.det_segments) segments.push_back(id);
  WriteJsonFile({{"seed", seed},
                 {"spec", SpecEcho(plan)},
                 {"gt_detections", DetectionsToJson(scene.gt_dets, spec.labels)},
                 {"gt_detection_segments", segments},
                 {"detection_truth", truth}},
                dir / "scene.json");
}

int RunSynth(const SynthOptions& o) {
  Stopwatch clock;
  const SynthPlan plan = ParsePlan(o.spec);
  const auto [first, last] = ParseSeeds(o.seeds);
  // Dry run on the first seed so spec errors surface before any write.
  {
    SceneSpec spec = plan.scene;
    spec.rng_seed = first;
    try {
      GenerateScene(spec);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kInfeasibleSpec) throw UsageError(e.what());
      throw;
    }
  }
  Manifest manifest;
  manifest.command = "synth";
  manifest.config = {{"spec", o.spec}, {"seeds", o.seeds}, {"out_dir", o.out_dir},
                     {"resolved_spec", SpecEcho(plan)}};
  manifest.add_input("spec", o.spec);
  manifest.timings_us["read"] = clock.lap_us();

  const std::size_t count = static_cast<std::size_t>(last - first) + 1;
  manifest.config["threads"] = WorkerCount(count);
  ParallelFor(count, [&](std::size_t i) {
    const std::uint64_t seed = first + i;
    WriteSeed(plan, seed, fs::path(o.out_dir) / SeedDirName(seed));
  });
  manifest.timings_us["generate"] = clock.lap_us();
  for (std::size_t i = 0; i < count; ++i) {
    manifest.outputs.push_back((fs::path(o.out_dir) / SeedDirName(first + i)).string());
  }
  WriteJsonFile(manifest.to_json(), fs::path(o.out_dir) / "manifest.json");
  std::cout << "wrote " << count << " scene(s) to " << o.out_dir << '\n';
  return kExitOk;
}

}  // namespace

void RegisterSynth(CLI::App& app, Runner& run) {
  auto o = std::make_shared<SynthOptions>();
  CLI::App* sub = app.add_subcommand("synth", "Generate synthetic scenes and branch outputs");
  sub->add_option("--spec", o->spec, "Scene spec JSON")->required()->check(CLI::ExistingFile);
  sub->add_option("--seeds", o->seeds, "Inclusive seed range A..B")->required();
  sub->add_option("--out-dir", o->out_dir, "Output directory (one seed_NNNNN per seed)")
      ->required();
  sub->callback([o, &run] { run = [o] { return RunSynth(*o); }; });
}

}  // namespace panofuse::cli
