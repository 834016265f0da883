/* Copyright 2026 The camforge Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include "camforge/orchestrator.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <set>
#include <vector>

#include "camforge/detection_eval.hpp"
#include "camforge/error.hpp"
#include "camforge/isp_pipeline.hpp"
#include "camforge/log.hpp"
#include "camforge/raw_io.hpp"
#include "camforge/scene_io.hpp"
#include "camforge/set_distance.hpp"
#include "camforge/text.hpp"
#include "camforge/variant_factory.hpp"

namespace camforge {
namespace fs = std::filesystem;

namespace {

constexpr const char* kModules[] = {"scene_io",      "sensor_model",   "exposure_control", "isp_pipeline",
                                    "variant_factory", "detection_eval", "set_distance",     "cli_orchestrator"};

class RunLog {
 public:
  RunLog(std::string command, const ExperimentConfig& cfg, int jobs)
      : command_(std::move(command)), cfg_(cfg), jobs_(jobs), start_(std::chrono::steady_clock::now()) {}

  void commit() const {
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    std::string out = "[" + command_ + "]\n";
    out += "version=" + std::string(kVersion) + "\n";
    for (const char* m : kModules) out += "module." + std::string(m) + "=" + kVersion + "\n";
    out += "jobs=" + std::to_string(jobs_) + "\n";
    out += "wall_time_s=" + text::format_fixed(wall, 3) + "\n";
    out += cfg_.resolved_text();
    out += "\n";
    fs::create_directories(cfg_.output_directory);
    std::ofstream f(cfg_.output_directory / "run.log", std::ios::app | std::ios::binary);
    f << out;
    if (!f) fail(ErrorCode::kIo, "cannot append to " + (cfg_.output_directory / "run.log").string());
  }

 private:
  std::string command_;
  const ExperimentConfig& cfg_;
  int jobs_;
  std::chrono::steady_clock::time_point start_;
};

const fs::path& require_manifest(const ExperimentConfig& cfg) {
  if (cfg.input_manifest.empty()) fail(ErrorCode::kInvalidArgument, "input.manifest is not set");
  return cfg.input_manifest;
}

std::vector<std::pair<std::string, std::string>> base_provenance(const ExperimentConfig& cfg, const char* stage) {
  return {{"stage", stage},
          {"seed_base", std::to_string(cfg.seed)},
          {"settings_digest", cfg.pipeline.digest()},
          {"labeling_policy", labeling_kind_name(cfg.pipeline.labeling.kind)}};
}

LabelSet only_class(const LabelSet& set, const std::string& cls) {
  if (cls.empty()) return set;
  LabelSet out{set.scene_id, {}};
  std::copy_if(set.boxes.begin(), set.boxes.end(), std::back_inserter(out.boxes),
               [&](const BoundingBox& b) { return b.cls == cls; });
  return out;
}

fs::path raw_path_for(const fs::path& scene_file) {
  const std::string s = scene_file.string();
  const std::string raw_suffix = ".raw.png";
  if (s.size() >= raw_suffix.size() && s.compare(s.size() - raw_suffix.size(), raw_suffix.size(), raw_suffix) == 0) {
    return scene_file;
  }
  if (scene_file.extension() == ".png") return fs::path(s.substr(0, s.size() - 4) + raw_suffix);
  fail(ErrorCode::kInvalidArgument, "census needs raw frames; '" + s + "' is not a PNG frame");
}

}  // namespace

ExperimentConfig resolve_config(const fs::path& config_path, const RunOverrides& overrides) {
  ExperimentConfig cfg;
  if (!config_path.empty()) cfg = load_config(config_path);
  if (overrides.seed) cfg.seed = *overrides.seed;
  if (overrides.out) cfg.output_directory = overrides.out->lexically_normal();
  if (overrides.manifest) cfg.input_manifest = overrides.manifest->lexically_normal();
  if (overrides.jobs && *overrides.jobs < 1) fail(ErrorCode::kInvalidArgument, "--jobs must be >= 1");
  return cfg;
}

std::string cmd_simulate(const ExperimentConfig& cfg, int jobs) {
  RunLog run_log("simulate", cfg, jobs);
  const fs::path& manifest_path = require_manifest(cfg);
  const DatasetManifest base = load_manifest(manifest_path);
  const fs::path dir = cfg.output_directory / "simulate";
  render_dataset(base, manifest_path, cfg.pipeline, cfg.seed, dir, base_provenance(cfg, "simulate"), jobs);
  run_log.commit();
  return "simulated " + std::to_string(base.entries.size()) + " scenes into " + dir.string();
}

std::string cmd_variants(const ExperimentConfig& cfg, int jobs) {
  RunLog run_log("variants", cfg, jobs);
  if (cfg.variant_axis.empty()) fail(ErrorCode::kInvalidArgument, "variants.axis is not set");
  VariantSpec spec;
  spec.base_manifest_path = require_manifest(cfg);
  spec.base_manifest = load_manifest(spec.base_manifest_path);
  spec.axis = parse_axis(cfg.variant_axis);
  spec.values = cfg.variant_values;
  spec.fixed = cfg.pipeline;
  spec.seed_base = cfg.seed;
  const fs::path dir = cfg.output_directory / "variants";
  const auto manifests = generate_variants(spec, dir, jobs);
  run_log.commit();
  return "generated " + std::to_string(manifests.size()) + " variants along " + cfg.variant_axis + " into " +
         dir.string();
}

std::string cmd_eval(const ExperimentConfig& cfg) {
  RunLog run_log("eval", cfg, 1);
  const fs::path& manifest_path = require_manifest(cfg);
  if (cfg.eval_detections.empty()) fail(ErrorCode::kInvalidArgument, "eval.detections is not set");
  const DatasetManifest manifest = load_manifest(manifest_path);

  std::vector<LabelSet> gts;
  std::vector<DetectionSet> dets;
  for (const auto& e : manifest.entries) {
    gts.push_back(only_class(load_labels(resolve_manifest_path(manifest_path, e.label_file), e.scene_id),
                             cfg.eval_class));
    const fs::path det_path = cfg.eval_detections / (e.scene_id + ".csv");
    if (!fs::exists(det_path)) fail(ErrorCode::kIo, "missing detections for scene " + e.scene_id + ": " + det_path.string());
    DetectionSet d = only_class(load_labels(det_path, e.scene_id), cfg.eval_class);
    for (const auto& b : d.boxes) {
      if (!b.score) fail(ErrorCode::kInvalidData, det_path.string() + ": detection without a score");
    }
    dets.push_back(std::move(d));
  }
  std::vector<EvalImage> images;
  for (std::size_t i = 0; i < gts.size(); ++i) images.push_back({&dets[i], &gts[i]});

  const MatchResult m = match_dataset(images, cfg.eval_iou_threshold);
  const PrCurve curve = average_precision(m);

  const fs::path dir = cfg.output_directory / "eval";
  fs::create_directories(dir);
  std::string pr = "recall,precision\n";
  for (const auto& p : curve.points) pr += text::format_double(p.recall) + "," + text::format_double(p.precision) + "\n";
  text::write_file_atomic(dir / "pr_curve.csv", pr);

  std::string ap = "ap=" + text::format_double(curve.ap) + "\n";
  ap += "tp=" + std::to_string(m.tp) + "\nfp=" + std::to_string(m.fp) + "\nfn=" + std::to_string(m.fn) + "\n";
  ap += "iou_threshold=" + text::format_double(cfg.eval_iou_threshold) + "\n";
  ap += "class=" + (cfg.eval_class.empty() ? std::string("all") : cfg.eval_class) + "\n";
  text::write_file_atomic(dir / "ap.txt", ap);

  if (!cfg.eval_distance_bins.empty()) {
    const DistanceApReport report = ap_by_distance(images, cfg.eval_distance_bins, cfg.eval_iou_threshold);
    std::string csv = "lo_m,hi_m,gt_count,detection_count,ap\n";
    for (const auto& b : report.bins) {
      csv += text::format_double(b.lo_m) + "," + text::format_double(b.hi_m) + "," + std::to_string(b.gt_count) + "," +
             std::to_string(b.detection_count) + "," + text::format_double(b.ap) + "\n";
    }
    text::write_file_atomic(dir / "ap_by_distance.csv", csv);
    ap += "unassignable_detections=" + std::to_string(report.unassignable_detections) + "\n";
  }
  run_log.commit();
  return ap;
}

std::string cmd_census(const ExperimentConfig& cfg) {
  RunLog run_log("census", cfg, 1);
  const fs::path& manifest_path = require_manifest(cfg);
  const DatasetManifest manifest = load_manifest(manifest_path);
  std::string csv = "scene_id,bit_depth,fraction,levels\n";
  long long total = 0;
  for (const auto& e : manifest.entries) {
    const RawFrame raw = load_raw_frame(raw_path_for(resolve_manifest_path(manifest_path, e.scene_file)));
    const int levels = dark_level_census(raw, cfg.census_fraction);
    total += levels;
    csv += e.scene_id + "," + std::to_string(raw.bit_depth) + "," + text::format_double(cfg.census_fraction) + "," +
           std::to_string(levels) + "\n";
  }
  fs::create_directories(cfg.output_directory);
  text::write_file_atomic(cfg.output_directory / "census.csv", csv);
  run_log.commit();
  return "census scenes=" + std::to_string(manifest.entries.size()) + " total_levels=" + std::to_string(total) + "\n";
}

std::string cmd_matrix(const ExperimentConfig& cfg, const fs::path& cells_csv, double asymmetry_threshold) {
  RunLog run_log("matrix", cfg, 1);
  const auto cells = load_matrix_cells(cells_csv);
  const GeneralizationMatrix matrix = build_matrix(cells, asymmetry_threshold);
  const std::string rendered = render_matrix(matrix);
  const fs::path dir = cfg.output_directory / "matrix";
  fs::create_directories(dir);
  text::write_file_atomic(dir / "matrix.txt", rendered);
  text::write_file_atomic(dir / "matrix.csv", matrix_to_csv(matrix));
  run_log.commit();
  return rendered;
}

std::string cmd_kid(const ExperimentConfig& cfg, const fs::path& features_a, const fs::path& features_b) {
  RunLog run_log("kid", cfg, 1);
  const FeatureSet a = load_features(features_a);
  const FeatureSet b = load_features(features_b);
  const KidResult r = kid(a, b, cfg.kid_block_size, cfg.seed);
  std::string out = format_kid(r);
  if (out.empty() || out.back() != '\n') out += "\n";
  if (r.dropped_a || r.dropped_b) {
    log::info("kid dropped remainder vectors: a=" + std::to_string(r.dropped_a) + " b=" + std::to_string(r.dropped_b));
  }
  fs::create_directories(cfg.output_directory);
  text::write_file_atomic(cfg.output_directory / "kid.txt", out);
  run_log.commit();
  return out;
}

}  // namespace camforge
