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
#include "camforge/config.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>

#include "camforge/error.hpp"
#include "camforge/text.hpp"

namespace camforge {
namespace fs = std::filesystem;

namespace {

struct Entry {
  std::string value;
  int line = 0;
};

class KeyReader {
 public:
  KeyReader(std::map<std::string, Entry> entries, std::string origin)
      : entries_(std::move(entries)), origin_(std::move(origin)) {}

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  // Runs `apply` on the value of `key` when present and prefixes any error
  // with the key's location.
  void with(const std::string& key, const std::function<void(const std::string&)>& apply) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return;
    try {
      apply(it->second.value);
    } catch (const Error& e) {
      fail(ErrorCode::kParse, where(key) + e.what());
    }
  }

  [[noreturn]] void bad(const std::string& key, const std::string& expected) const {
    fail(ErrorCode::kParse, where(key) + "bad value '" + entries_.at(key).value + "' (expected " + expected + ")");
  }

  std::string where(const std::string& key) const {
    return origin_ + ":" + std::to_string(entries_.at(key).line) + ": key '" + key + "': ";
  }

 private:
  std::map<std::string, Entry> entries_;
  std::string origin_;
};

double to_double(const std::string& v) {
  double out = 0;
  if (!text::parse_double(v, out) || !std::isfinite(out)) fail(ErrorCode::kParse, "expected a number, got '" + v + "'");
  return out;
}

long long to_int(const std::string& v) {
  long long out = 0;
  if (!text::parse_int(v, out)) fail(ErrorCode::kParse, "expected an integer, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& v) {
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  fail(ErrorCode::kParse, "expected on or off, got '" + v + "'");
}

std::vector<double> to_doubles(const std::string& v) {
  std::vector<double> out;
  if (text::trim(v).empty()) return out;
  for (const auto& part : text::split(v, ',')) out.push_back(to_double(std::string(text::trim(part))));
  return out;
}

std::vector<std::string> to_strings(const std::string& v) {
  std::vector<std::string> out;
  if (text::trim(v).empty()) return out;
  for (const auto& part : text::split(v, ',')) {
    const std::string item(text::trim(part));
    if (item.empty()) fail(ErrorCode::kParse, "empty list item in '" + v + "'");
    out.push_back(item);
  }
  return out;
}

fs::path to_path(const std::string& v, const fs::path& base_dir) {
  if (v.empty()) return {};
  const fs::path p(v);
  return p.is_absolute() ? p.lexically_normal() : (base_dir / p).lexically_normal();
}

std::string doubles_text(const std::vector<double>& values) {
  std::vector<std::string> parts;
  for (double v : values) parts.push_back(text::format_double(v));
  return text::join(parts, ",");
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "input.manifest",
      "sensor.preset",
      "sensor.pitch_um",
      "sensor.width_px",
      "sensor.height_px",
      "sensor.cfa",
      "sensor.qe",
      "sensor.well_capacity_e",
      "sensor.read_noise_e",
      "sensor.dark_current_e_per_s",
      "sensor.conversion_gain_v_per_e",
      "sensor.voltage_swing_v",
      "sensor.bit_depth",
      "sensor.psf_fwhm_um",
      "sensor.shot_noise",
      "exposure.kind",
      "exposure.target_fraction",
      "exposure.max_ms",
      "exposure.brackets_ms",
      "exposure.percentile",
      "exposure.window",
      "isp.demosaic",
      "isp.gamma",
      "isp.output_depth",
      "labels.policy",
      "labels.min_box_height_px",
      "labels.max_distance_m",
      "variants.axis",
      "variants.values",
      "eval.detections",
      "eval.iou_threshold",
      "eval.distance_bins",
      "eval.class",
      "census.fraction",
      "kid.block_size",
      "output.directory",
      "seed",
  };
  return keys;
}

ExperimentConfig parse_config(const std::string& contents, const std::string& origin, const fs::path& base_dir) {
  const auto& known = config_keys();
  std::map<std::string, Entry> entries;
  int line_no = 0;
  for (const auto& raw_line : text::split(contents, '\n')) {
    ++line_no;
    const std::string_view line = text::trim(raw_line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    const std::string loc = origin + ":" + std::to_string(line_no) + ": ";
    if (eq == std::string_view::npos) fail(ErrorCode::kParse, loc + "expected key=value, got '" + std::string(line) + "'");
    const std::string key(text::trim(line.substr(0, eq)));
    const std::string value(text::trim(line.substr(eq + 1)));
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      fail(ErrorCode::kParse, loc + "unknown key '" + key + "'");
    }
    if (entries.count(key)) {
      fail(ErrorCode::kParse, loc + "key '" + key + "' already set on line " + std::to_string(entries[key].line));
    }
    entries[key] = {value, line_no};
  }

  const KeyReader r(std::move(entries), origin);
  ExperimentConfig cfg;
  r.with("input.manifest", [&](const std::string& v) { cfg.input_manifest = to_path(v, base_dir); });

  SensorConfig& s = cfg.pipeline.sensor;
  double pitch = s.pixel_pitch_um;
  r.with("sensor.pitch_um", [&](const std::string& v) { pitch = to_double(v); });
  std::string preset = "custom";
  r.with("sensor.preset", [&](const std::string& v) {
    preset = v;
    if (preset != "custom") s = make_preset(preset, pitch);
  });
  s.pixel_pitch_um = pitch;
  r.with("sensor.width_px", [&](const std::string& v) { s.array_width_px = static_cast<int>(to_int(v)); });
  r.with("sensor.height_px", [&](const std::string& v) { s.array_height_px = static_cast<int>(to_int(v)); });
  r.with("sensor.cfa", [&](const std::string& v) { s.cfa = CfaPattern::from_name(v, 3); });
  r.with("sensor.qe", [&](const std::string& v) { s.qe = to_doubles(v); });
  r.with("sensor.well_capacity_e", [&](const std::string& v) { s.well_capacity_e = to_double(v); });
  r.with("sensor.read_noise_e", [&](const std::string& v) { s.read_noise_e = to_double(v); });
  r.with("sensor.dark_current_e_per_s", [&](const std::string& v) { s.dark_current_e_per_s = to_double(v); });
  r.with("sensor.conversion_gain_v_per_e", [&](const std::string& v) { s.conversion_gain_v_per_e = to_double(v); });
  r.with("sensor.voltage_swing_v", [&](const std::string& v) { s.voltage_swing_v = to_double(v); });
  r.with("sensor.bit_depth", [&](const std::string& v) { s.bit_depth = static_cast<int>(to_int(v)); });
  r.with("sensor.psf_fwhm_um", [&](const std::string& v) { s.psf_fwhm_um = to_double(v); });
  r.with("sensor.shot_noise", [&](const std::string& v) { s.shot_noise = to_bool(v); });
  ExposurePolicy& e = cfg.pipeline.exposure;
  r.with("exposure.kind", [&](const std::string& v) { e.kind = parse_exposure_kind(v); });
  r.with("exposure.target_fraction", [&](const std::string& v) { e.target_fraction = to_double(v); });
  r.with("exposure.max_ms", [&](const std::string& v) { e.max_duration_s = to_double(v) / 1000.0; });
  r.with("exposure.brackets_ms", [&](const std::string& v) {
    e.bracket_durations_s.clear();
    for (double ms : to_doubles(v)) e.bracket_durations_s.push_back(ms / 1000.0);
  });
  r.with("exposure.percentile", [&](const std::string& v) { e.metering_percentile = to_double(v); });
  r.with("exposure.window", [&](const std::string& v) {
    const auto w = to_doubles(v);
    if (w.size() != 4) r.bad("exposure.window", "x0,x1,y0,y1");
    e.center_window = {w[0], w[1], w[2], w[3]};
  });

  PipelineSettings& p = cfg.pipeline;
  r.with("isp.demosaic", [&](const std::string& v) { p.demosaic = to_bool(v); });
  r.with("isp.gamma", [&](const std::string& v) {
    double g = 0;
    if (v == "none") {
      p.gamma_mode = GammaMode::kNone;
    } else if (v == "adaptive") {
      p.gamma_mode = GammaMode::kAdaptive;
    } else if (text::parse_double(v, g) && g > 0) {
      p.gamma_mode = GammaMode::kFixed;
      p.gamma_value = g;
    } else {
      r.bad("isp.gamma", "none, adaptive or a positive number");
    }
  });
  r.with("isp.output_depth", [&](const std::string& v) { p.output_depth = static_cast<int>(to_int(v)); });

  r.with("labels.policy", [&](const std::string& v) { p.labeling.kind = parse_labeling_kind(v); });
  r.with("labels.min_box_height_px",
         [&](const std::string& v) { p.labeling.min_box_height_px = static_cast<int>(to_int(v)); });
  r.with("labels.max_distance_m", [&](const std::string& v) { p.labeling.max_distance_m = to_double(v); });

  r.with("variants.axis", [&](const std::string& v) {
    if (!v.empty()) parse_axis(v);
    cfg.variant_axis = v;
  });
  r.with("variants.values", [&](const std::string& v) { cfg.variant_values = to_strings(v); });

  r.with("eval.detections", [&](const std::string& v) { cfg.eval_detections = to_path(v, base_dir); });
  r.with("eval.iou_threshold", [&](const std::string& v) {
    cfg.eval_iou_threshold = to_double(v);
    if (!(cfg.eval_iou_threshold > 0 && cfg.eval_iou_threshold <= 1)) r.bad("eval.iou_threshold", "a value in (0,1]");
  });
  r.with("eval.distance_bins", [&](const std::string& v) {
    cfg.eval_distance_bins = to_doubles(v);
    const auto& b = cfg.eval_distance_bins;
    if (b.size() == 1 || std::adjacent_find(b.begin(), b.end(), std::greater_equal<>()) != b.end()) {
      r.bad("eval.distance_bins", "at least two strictly ascending edges");
    }
  });
  r.with("eval.class", [&](const std::string& v) { cfg.eval_class = v; });

  r.with("census.fraction", [&](const std::string& v) {
    cfg.census_fraction = to_double(v);
    if (!(cfg.census_fraction > 0 && cfg.census_fraction <= 1)) r.bad("census.fraction", "a value in (0,1]");
  });
  r.with("kid.block_size", [&](const std::string& v) {
    cfg.kid_block_size = static_cast<int>(to_int(v));
    if (cfg.kid_block_size < 2) r.bad("kid.block_size", "an integer >= 2");
  });
  cfg.output_directory = to_path(cfg.output_directory.string(), base_dir);
  r.with("output.directory", [&](const std::string& v) {
    if (v.empty()) r.bad("output.directory", "a directory");
    cfg.output_directory = to_path(v, base_dir);
  });
  r.with("seed", [&](const std::string& v) {
    if (!text::parse_u64(v, cfg.seed)) r.bad("seed", "an unsigned 64-bit integer");
  });

  try {
    cfg.pipeline.validate();
  } catch (const Error& err) {
    fail(ErrorCode::kParse, origin + ": " + err.what());
  }
  return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
  const std::string contents = text::read_file(path);
  return parse_config(contents, path.string(), path.parent_path());
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::resolved() const {
  std::vector<std::pair<std::string, std::string>> kv{{"input.manifest", input_manifest.string()}};
  for (auto& item : pipeline.describe()) kv.push_back(std::move(item));
  kv.emplace_back("variants.axis", variant_axis);
  kv.emplace_back("variants.values", text::join(variant_values, ","));
  kv.emplace_back("eval.detections", eval_detections.string());
  kv.emplace_back("eval.iou_threshold", text::format_double(eval_iou_threshold));
  kv.emplace_back("eval.distance_bins", doubles_text(eval_distance_bins));
  kv.emplace_back("eval.class", eval_class);
  kv.emplace_back("census.fraction", text::format_double(census_fraction));
  kv.emplace_back("kid.block_size", std::to_string(kid_block_size));
  kv.emplace_back("output.directory", output_directory.string());
  kv.emplace_back("seed", std::to_string(seed));
  return kv;
}

std::string ExperimentConfig::resolved_text() const {
  std::string out;
  for (const auto& [k, v] : resolved()) out += k + "=" + v + "\n";
  return out;
}

}  // namespace camforge
