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

#include <cstdio>
#include <iostream>
#include <memory>
#include <set>

#include "cli_common.hpp"
#include "commands.hpp"
#include "panofuse/io.hpp"
#include "panofuse/metrics.hpp"

namespace panofuse::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct EvalOptions {
  std::string gt_dir;
  std::string pred_dir;
  std::string labels;
  std::string gt_json;
  std::string pred_json;
  std::string out;
  bool allow_missing = false;
};

struct Pairing {
  std::vector<fs::path> common;
  std::vector<std::string> missing;  // "pred: a/b.png" style
  std::vector<fs::path> gt_files;
  std::vector<fs::path> pred_files;
};

// Per-image sidecar JSON next to the PNG unless a COCO annotation file was
// given for the whole directory.
fs::path Annotation(const fs::path& png, const std::string& coco_json) {
  if (!coco_json.empty()) return coco_json;
  fs::path j = png;
  j.replace_extension(".json");
  return j;
}

Pairing PairDirectories(const EvalOptions& o) {
  const std::vector<fs::path> gt = ListPngs(o.gt_dir);
  const std::vector<fs::path> pred = ListPngs(o.pred_dir);
  const std::set<fs::path> gt_set(gt.begin(), gt.end());
  const std::set<fs::path> pred_set(pred.begin(), pred.end());
  Pairing p;
  for (const auto& f : gt) {
    if (pred_set.contains(f)) {
      p.common.push_back(f);
    } else {
      p.missing.push_back("missing prediction: " + f.generic_string());
    }
  }
  for (const auto& f : pred) {
    if (!gt_set.contains(f)) p.missing.push_back("missing ground truth: " + f.generic_string());
  }
  if (!p.missing.empty()) {
    for (const auto& m : p.missing) std::cerr << m << '\n';
    if (!o.allow_missing) {
      throw Error(ErrorCode::kIo, std::to_string(p.missing.size()) +
                                      " file(s) lack a counterpart (use --allow-missing)");
    }
  }
  if (p.common.empty()) {
    throw Error(ErrorCode::kIo, "no panoptic PNG appears in both " + o.gt_dir +
                                    " and " + o.pred_dir);
  }
  for (const auto& f : p.common) {
    p.gt_files.push_back(f);
    p.pred_files.push_back(f);
    if (o.gt_json.empty()) p.gt_files.push_back(Annotation(f, ""));
    if (o.pred_json.empty()) p.pred_files.push_back(Annotation(f, ""));
  }
  return p;
}

std::pair<PanopticMap, PanopticMap> LoadPair(const EvalOptions& o, const fs::path& rel,
                                             const LabelSpace& labels) {
  const fs::path g = fs::path(o.gt_dir) / rel;
  const fs::path p = fs::path(o.pred_dir) / rel;
  PanopticMap gt = ReadPanoptic(g, Annotation(g, o.gt_json), labels);
  PanopticMap pred = ReadPanoptic(p, Annotation(p, o.pred_json), labels);
  if (gt.height() != pred.height() || gt.width() != pred.width()) {
    throw Error(ErrorCode::kDimensionMismatch, rel.generic_string() +
                                                   ": ground truth and prediction differ in size");
  }
  return {std::move(gt), std::move(pred)};
}

json Optional(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

void Emit(const json& report, const Manifest& manifest, const EvalOptions& o,
          const std::string& summary) {
  if (o.out.empty()) {
    std::cout << report.dump(2) << '\n';
    std::cerr << manifest.to_json().dump() << '\n';
    return;
  }
  if (fs::path(o.out).has_parent_path()) fs::create_directories(fs::path(o.out).parent_path());
  WriteJsonFile(report, o.out);
  WriteJsonFile(manifest.to_json(), o.out + ".manifest.json");
  std::cout << summary;
}

Manifest StartManifest(const char* command, const EvalOptions& o, const Pairing& p) {
  Manifest m;
  m.command = command;
  m.config = {{"gt_dir", o.gt_dir},
              {"pred_dir", o.pred_dir},
              {"labels", o.labels},
              {"out", o.out},
              {"gt_json", o.gt_json},
              {"pred_json", o.pred_json},
              {"allow_missing", o.allow_missing},
              {"threads", WorkerCount(p.common.size())}};
  m.add_input("labels", o.labels);
  m.inputs["gt_dir"] = {{"path", o.gt_dir}, {"sha256", Sha256OfFiles(o.gt_dir, p.gt_files)}};
  m.inputs["pred_dir"] = {{"path", o.pred_dir},
                          {"sha256", Sha256OfFiles(o.pred_dir, p.pred_files)}};
  if (!o.gt_json.empty()) m.add_input("gt_json", o.gt_json);
  if (!o.pred_json.empty()) m.add_input("pred_json", o.pred_json);
  if (!o.out.empty()) m.outputs = {o.out};
  return m;
}

std::string Percent(const std::optional<double>& v) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * *v);
  return buf;
}

int RunEvalPq(const EvalOptions& o) {
  Stopwatch clock;
  const LabelSpace labels = ReadLabelSpace(o.labels);
  const Pairing pairing = PairDirectories(o);
  Manifest manifest = StartManifest("eval-pq", o, pairing);
  manifest.timings_us["read"] = clock.lap_us();

  std::vector<PqAccumulator> per_image(pairing.common.size());
  ParallelFor(pairing.common.size(), [&](std::size_t i) {
    const auto [gt, pred] = LoadPair(o, pairing.common[i], labels);
    per_image[i].add(MatchSegments(gt, pred, labels));
  });
  PqAccumulator total;
  for (const auto& a : per_image) total.merge(a);
  const PqScores scores = ComputePq(total, labels);
  manifest.timings_us["evaluate"] = clock.lap_us();

  json rows = json::array();
  for (const auto& [cls, c] : scores.per_class) {
    const ClassInfo& info = labels.at(cls);
    rows.push_back({{"category_id", info.external_id},
                    {"name", info.name},
                    {"isthing", info.kind == ClassKind::kThing ? 1 : 0},
                    {"pq", c.pq}, {"sq", c.sq}, {"rq", c.rq},
                    {"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn},
                    {"iou_sum", c.iou_sum}});
  }
  json report = {{"pq", Optional(scores.pq)},
                 {"pq_things", Optional(scores.pq_things)},
                 {"pq_stuff", Optional(scores.pq_stuff)},
                 {"images", scores.images},
                 {"per_class", rows}};
  if (!pairing.missing.empty()) report["missing"] = pairing.missing;
  const std::string summary = "PQ " + Percent(scores.pq) + "  PQ_th " +
                              Percent(scores.pq_things) + "  PQ_st " +
                              Percent(scores.pq_stuff) + "  (" +
                              std::to_string(scores.images) + " images)\n";
  Emit(report, manifest, o, summary);
  return kExitOk;
}

int RunEvalMiou(const EvalOptions& o) {
  Stopwatch clock;
  const LabelSpace labels = ReadLabelSpace(o.labels);
  const Pairing pairing = PairDirectories(o);
  Manifest manifest = StartManifest("eval-miou", o, pairing);
  manifest.timings_us["read"] = clock.lap_us();

  std::vector<ConfusionAccumulator> per_image(pairing.common.size(),
                                              ConfusionAccumulator(labels));
  ParallelFor(pairing.common.size(), [&](std::size_t i) {
    const auto [gt, pred] = LoadPair(o, pairing.common[i], labels);
    per_image[i].add(gt.class_image(), pred.class_image());
  });
  ConfusionAccumulator total(labels);
  for (const auto& a : per_image) total.merge(a);
  manifest.timings_us["evaluate"] = clock.lap_us();

  json rows = json::array();
  for (const auto& [cls, iou] : total.class_iou()) {
    const ClassInfo& info = labels.at(cls);
    rows.push_back({{"category_id", info.external_id}, {"name", info.name}, {"iou", iou}});
  }
  const json report = {{"miou", Optional(total.miou())},
                       {"images", pairing.common.size()},
                       {"per_class", rows}};
  Emit(report, manifest, o,
       "mIoU " + Percent(total.miou()) + "  (" + std::to_string(pairing.common.size()) +
           " images)\n");
  return kExitOk;
}

CLI::App* AddEvalCommand(CLI::App& app, const char* name, const char* help,
                         std::shared_ptr<EvalOptions> o) {
  CLI::App* sub = app.add_subcommand(name, help);
  sub->add_option("--gt-dir", o->gt_dir, "Ground-truth panoptic PNG + JSON directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  sub->add_option("--pred-dir", o->pred_dir, "Predicted panoptic PNG + JSON directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  sub->add_option("--labels", o->labels, "Label space JSON")->required()->check(CLI::ExistingFile);
  sub->add_option("--gt-json", o->gt_json,
                  "COCO panoptic annotation file for --gt-dir (default: per-PNG sidecars)")
      ->check(CLI::ExistingFile);
  sub->add_option("--pred-json", o->pred_json,
                  "COCO panoptic annotation file for --pred-dir (default: per-PNG sidecars)")
      ->check(CLI::ExistingFile);
  sub->add_option("--out", o->out, "Report JSON (stdout when omitted)");
  sub->add_flag("--allow-missing", o->allow_missing,
                "Evaluate the common files even if some lack a counterpart");
  return sub;
}

}  // namespace

void RegisterEval(CLI::App& app, Runner& run) {
  auto pq = std::make_shared<EvalOptions>();
  AddEvalCommand(app, "eval-pq", "Panoptic quality of a prediction directory", pq)
      ->callback([pq, &run] { run = [pq] { return RunEvalPq(*pq); }; });
  auto miou = std::make_shared<EvalOptions>();
  AddEvalCommand(app, "eval-miou", "Semantic mIoU of a prediction directory", miou)
      ->callback([miou, &run] { run = [miou] { return RunEvalMiou(*miou); }; });
}

}  // namespace panofuse::cli
