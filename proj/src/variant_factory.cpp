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
#include "camforge/variant_factory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "camforge/error.hpp"
#include "camforge/log.hpp"
#include "camforge/parallel.hpp"
#include "camforge/raw_io.hpp"
#include "camforge/rng.hpp"
#include "camforge/text.hpp"

namespace camforge {
namespace fs = std::filesystem;

void LabelingPolicy::validate() const {
  if (min_box_height_px <= 0) fail(ErrorCode::kInvalidArgument, "min_box_height_px must be > 0");
  if (!(max_distance_m > 0)) fail(ErrorCode::kInvalidArgument, "max_distance_m must be > 0");
}

std::string labeling_kind_name(LabelingKind kind) {
  switch (kind) {
    case LabelingKind::kNone: return "none";
    case LabelingKind::kKittiMinBox: return "kitti";
    case LabelingKind::kDistanceCutoff: return "distance";
  }
  return "?";
}

LabelingKind parse_labeling_kind(const std::string& name) {
  if (name == "none") return LabelingKind::kNone;
  if (name == "kitti" || name == "kitti-min-box") return LabelingKind::kKittiMinBox;
  if (name == "distance" || name == "distance-cutoff") return LabelingKind::kDistanceCutoff;
  fail(ErrorCode::kInvalidArgument, "unknown labeling policy '" + name + "' (expected none, kitti or distance)");
}

LabelSet scale_labels(const LabelSet& labels, double factor) {
  if (!(factor > 0) || !std::isfinite(factor)) fail(ErrorCode::kInvalidArgument, "label scale factor must be > 0");
  LabelSet out = labels;
  for (auto& b : out.boxes) {
    b.x_min *= factor;
    b.y_min *= factor;
    b.x_max *= factor;
    b.y_max *= factor;
  }
  return out;
}

LabelSet apply_policy(const LabelSet& labels, const LabelingPolicy& policy) {
  policy.validate();
  LabelSet out;
  out.scene_id = labels.scene_id;
  for (const auto& b : labels.boxes) {
    switch (policy.kind) {
      case LabelingKind::kNone:
        out.boxes.push_back(b);
        break;
      case LabelingKind::kKittiMinBox:
        if (b.height() > policy.min_box_height_px) out.boxes.push_back(b);
        break;
      case LabelingKind::kDistanceCutoff:
        if (!b.distance_m) {
          fail(ErrorCode::kInvalidData, "distance cutoff needs distance_m; missing in scenes: " + labels.scene_id);
        }
        if (*b.distance_m <= policy.max_distance_m) out.boxes.push_back(b);
        break;
    }
  }
  return out;
}

std::vector<LabelSet> apply_policy(const std::vector<LabelSet>& label_sets, const LabelingPolicy& policy) {
  if (policy.kind == LabelingKind::kDistanceCutoff) {
    std::vector<std::string> offending;
    for (const auto& ls : label_sets) {
      if (std::any_of(ls.boxes.begin(), ls.boxes.end(), [](const BoundingBox& b) { return !b.distance_m; })) {
        offending.push_back(ls.scene_id);
      }
    }
    if (!offending.empty()) {
      fail(ErrorCode::kInvalidData,
           "distance cutoff needs distance_m; missing in scenes: " + text::join(offending, ","));
    }
  }
  std::vector<LabelSet> out;
  out.reserve(label_sets.size());
  for (const auto& ls : label_sets) out.push_back(apply_policy(ls, policy));
  return out;
}

namespace {

std::string ms_text(double seconds) {
  return text::format_double(std::round(seconds * 1e12) / 1e9);
}

std::string doubles_text(const std::vector<double>& values, bool as_ms) {
  std::vector<std::string> parts;
  for (double v : values) parts.push_back(as_ms ? ms_text(v) : text::format_double(v));
  return text::join(parts, ",");
}

std::string gamma_text(GammaMode mode, double value) {
  switch (mode) {
    case GammaMode::kNone: return "none";
    case GammaMode::kAdaptive: return "adaptive";
    case GammaMode::kFixed: return text::format_double(value);
  }
  return "?";
}

}  // namespace

void PipelineSettings::validate() const {
  sensor.validate();
  exposure.validate();
  labeling.validate();
  if (gamma_mode == GammaMode::kFixed && !(gamma_value > 0)) fail(ErrorCode::kInvalidArgument, "gamma must be > 0");
  if (output_depth != 8 && output_depth != 16) fail(ErrorCode::kInvalidArgument, "isp.output_depth must be 8 or 16");
}

std::vector<std::pair<std::string, std::string>> PipelineSettings::describe() const {
  const auto& s = sensor;
  const auto& w = exposure.center_window;
  std::vector<std::pair<std::string, std::string>> kv{
      {"sensor.preset", text::starts_with(s.name, "mt9v024-") ? s.name : "custom"},
      {"sensor.pitch_um", text::format_double(s.pixel_pitch_um)},
      {"sensor.width_px", std::to_string(s.array_width_px)},
      {"sensor.height_px", std::to_string(s.array_height_px)},
      {"sensor.cfa", s.cfa.name},
      {"sensor.qe", doubles_text(s.qe, false)},
      {"sensor.well_capacity_e", text::format_double(s.well_capacity_e)},
      {"sensor.read_noise_e", text::format_double(s.read_noise_e)},
      {"sensor.dark_current_e_per_s", text::format_double(s.dark_current_e_per_s)},
      {"sensor.conversion_gain_v_per_e", text::format_double(s.conversion_gain_v_per_e)},
      {"sensor.voltage_swing_v", text::format_double(s.voltage_swing_v)},
      {"sensor.bit_depth", std::to_string(s.bit_depth)},
      {"sensor.psf_fwhm_um", text::format_double(s.psf_fwhm_um)},
      {"sensor.shot_noise", s.shot_noise ? "true" : "false"},
      {"exposure.kind", exposure_kind_name(exposure.kind)},
      {"exposure.target_fraction", text::format_double(exposure.target_fraction)},
      {"exposure.max_ms", ms_text(exposure.max_duration_s)},
      {"exposure.brackets_ms", doubles_text(exposure.bracket_durations_s, true)},
      {"exposure.percentile", text::format_double(exposure.metering_percentile)},
      {"exposure.window", doubles_text({w.x0, w.x1, w.y0, w.y1}, false)},
      {"isp.demosaic", demosaic ? "on" : "off"},
      {"isp.gamma", gamma_text(gamma_mode, gamma_value)},
      {"isp.output_depth", std::to_string(output_depth)},
      {"labels.policy", labeling_kind_name(labeling.kind)},
      {"labels.min_box_height_px", std::to_string(labeling.min_box_height_px)},
      {"labels.max_distance_m", text::format_double(labeling.max_distance_m)},
  };
  return kv;
}

std::string PipelineSettings::digest() const {
  std::string blob;
  for (const auto& [k, v] : describe()) blob += k + "=" + v + "\n";
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a64(blob)));
  return hex;
}

std::string axis_name(VariantAxis axis) {
  switch (axis) {
    case VariantAxis::kPixelPitch: return "pixel_pitch";
    case VariantAxis::kBitDepth: return "bit_depth";
    case VariantAxis::kCfa: return "cfa";
    case VariantAxis::kExposurePolicy: return "exposure";
    case VariantAxis::kGamma: return "gamma";
    case VariantAxis::kDemosaic: return "demosaic";
  }
  return "?";
}

VariantAxis parse_axis(const std::string& name) {
  for (auto a : {VariantAxis::kPixelPitch, VariantAxis::kBitDepth, VariantAxis::kCfa, VariantAxis::kExposurePolicy,
                 VariantAxis::kGamma, VariantAxis::kDemosaic}) {
    if (axis_name(a) == name) return a;
  }
  fail(ErrorCode::kInvalidArgument,
       "unknown variant axis '" + name + "' (expected pixel_pitch, bit_depth, cfa, exposure, gamma or demosaic)");
}

bool axis_is_geometric(VariantAxis axis) { return axis == VariantAxis::kPixelPitch; }

std::pair<PipelineSettings, std::string> apply_axis_value(const PipelineSettings& base, VariantAxis axis,
                                                          const std::string& value) {
  PipelineSettings s = base;
  std::string canonical;
  switch (axis) {
    case VariantAxis::kPixelPitch: {
      double pitch = 0;
      if (!text::parse_double(value, pitch) || !(pitch > 0)) {
        fail(ErrorCode::kInvalidArgument, "bad pixel pitch '" + value + "'");
      }
      if (text::starts_with(base.sensor.name, "mt9v024-")) {
        // Presets carry their own array size per pitch; electrical settings
        // stay as configured.
        const SensorConfig preset = make_preset(base.sensor.name, pitch);
        s.sensor.pixel_pitch_um = preset.pixel_pitch_um;
        s.sensor.array_width_px = preset.array_width_px;
        s.sensor.array_height_px = preset.array_height_px;
      } else {
        const double ratio = base.sensor.pixel_pitch_um / pitch;
        s.sensor.pixel_pitch_um = pitch;
        s.sensor.array_width_px = static_cast<int>(std::floor(base.sensor.array_width_px * ratio));
        s.sensor.array_height_px = static_cast<int>(std::floor(base.sensor.array_height_px * ratio));
      }
      canonical = text::format_double(pitch);
      break;
    }
    case VariantAxis::kBitDepth: {
      long long depth = 0;
      if (!text::parse_int(value, depth)) fail(ErrorCode::kInvalidArgument, "bad bit depth '" + value + "'");
      s.sensor.bit_depth = static_cast<int>(depth);
      canonical = std::to_string(depth);
      break;
    }
    case VariantAxis::kCfa: {
      const int bands = base.sensor.cfa.filter_classes.empty()
                            ? 3
                            : static_cast<int>(base.sensor.cfa.filter_classes.front().band_weights.size());
      s.sensor.cfa = CfaPattern::from_name(value, bands);
      canonical = s.sensor.cfa.name;
      break;
    }
    case VariantAxis::kExposurePolicy:
      s.exposure.kind = parse_exposure_kind(value);
      canonical = exposure_kind_name(s.exposure.kind);
      break;
    case VariantAxis::kGamma: {
      double g = 0;
      if (value == "none") {
        s.gamma_mode = GammaMode::kNone;
      } else if (value == "adaptive") {
        s.gamma_mode = GammaMode::kAdaptive;
      } else if (text::parse_double(value, g) && g > 0) {
        s.gamma_mode = GammaMode::kFixed;
        s.gamma_value = g;
      } else {
        fail(ErrorCode::kInvalidArgument, "bad gamma '" + value + "' (expected none, adaptive or a positive number)");
      }
      canonical = gamma_text(s.gamma_mode, s.gamma_value);
      break;
    }
    case VariantAxis::kDemosaic:
      if (value == "on" || value == "true") {
        s.demosaic = true;
      } else if (value == "off" || value == "false") {
        s.demosaic = false;
      } else {
        fail(ErrorCode::kInvalidArgument, "bad demosaic value '" + value + "' (expected on or off)");
      }
      canonical = s.demosaic ? "on" : "off";
      break;
  }
  s.validate();
  return {std::move(s), canonical};
}

namespace {

}  // namespace

RenderedScene render_scene(const SceneIrradiance& scene, const LabelSet& labels, const PipelineSettings& base_settings,
                           std::uint64_t seed) {
  base_settings.validate();
  PipelineSettings settings = base_settings;
  settings.sensor = fit_mono_to_bands(settings.sensor, scene.bands);
  RenderedScene out;
  out.binning = pitch_ratio(scene.pixel_pitch_um, settings.sensor.pixel_pitch_um);
  SceneIrradiance sampled = resample_scene_to_sensor(scene, settings.sensor);
  if (settings.sensor.psf_fwhm_um > 0) sampled = apply_psf(sampled, settings.sensor.psf_fwhm_um);
  out.window = sensor_window(sampled.width_px, sampled.height_px, settings.sensor);
  sampled = crop_scene(sampled, out.window);

  out.raw = capture(sampled, settings.sensor, settings.exposure, seed);

  if (settings.demosaic) {
    out.processed = demosaic_bilinear(out.raw);
  } else if (settings.gamma_mode != GammaMode::kNone) {
    out.processed = normalize(out.raw);
  }
  if (settings.gamma_mode == GammaMode::kFixed) {
    out.processed = apply_gamma(*out.processed, settings.gamma_value);
  } else if (settings.gamma_mode == GammaMode::kAdaptive) {
    out.processed = adaptive_gamma(*out.processed).first;
  }

  const double r = out.binning;
  const double w = out.window.width;
  const double h = out.window.height;
  LabelSet moved;
  moved.scene_id = labels.scene_id;
  for (BoundingBox b : labels.boxes) {
    b.x_min = std::clamp(b.x_min / r - out.window.offset_x, 0.0, w);
    b.x_max = std::clamp(b.x_max / r - out.window.offset_x, 0.0, w);
    b.y_min = std::clamp(b.y_min / r - out.window.offset_y, 0.0, h);
    b.y_max = std::clamp(b.y_max / r - out.window.offset_y, 0.0, h);
    if (b.x_min < b.x_max && b.y_min < b.y_max) moved.boxes.push_back(std::move(b));
  }
  out.labels = apply_policy(moved, settings.labeling);
  return out;
}

std::uint64_t scene_seed(std::uint64_t seed_base, const std::string& scene_id) {
  return seed_base ^ fnv1a64(scene_id);
}

DatasetManifest render_dataset(const DatasetManifest& base, const fs::path& base_manifest_path,
                               const PipelineSettings& settings, std::uint64_t seed_base, const fs::path& out_dir,
                               std::vector<std::pair<std::string, std::string>> provenance, int jobs) {
  settings.validate();
  const std::size_t n = base.entries.size();
  std::vector<LabelSet> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& e = base.entries[i];
    labels[i] = load_labels(resolve_manifest_path(base_manifest_path, e.label_file), e.scene_id);
  }
  // Surfaces missing distances for every scene at once.
  if (settings.labeling.kind == LabelingKind::kDistanceCutoff) apply_policy(labels, settings.labeling);

  const fs::path staging = fs::path(out_dir.string() + ".partial");
  std::error_code ec;
  fs::remove_all(staging, ec);
  try {
    fs::create_directories(staging / "scenes");
    fs::create_directories(staging / "labels");
    std::vector<std::string> scene_files(n);
    parallel_for(n, jobs, [&](std::size_t i) {
      const auto& e = base.entries[i];
      const SceneIrradiance scene = load_scene(resolve_manifest_path(base_manifest_path, e.scene_file));
      const RenderedScene rendered = render_scene(scene, labels[i], settings, scene_seed(seed_base, e.scene_id));
      const fs::path stem = staging / "scenes" / e.scene_id;
      save_raw_frame(rendered.raw, stem);
      if (rendered.processed) {
        save_processed_image(*rendered.processed, stem, settings.output_depth);
        scene_files[i] = "scenes/" + e.scene_id + ".png";
      } else {
        scene_files[i] = "scenes/" + e.scene_id + ".raw.png";
      }
      save_labels(rendered.labels, staging / "labels" / (e.scene_id + ".csv"));
      log::debug("rendered scene " + e.scene_id + " -> " + out_dir.string());
    });

    DatasetManifest manifest;
    manifest.name = base.name;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& id = base.entries[i].scene_id;
      manifest.entries.push_back({id, scene_files[i], "labels/" + id + ".csv"});
    }
    manifest.provenance = std::move(provenance);
    save_manifest(manifest, staging / "manifest.txt");

    fs::remove_all(out_dir, ec);
    if (out_dir.has_parent_path()) fs::create_directories(out_dir.parent_path());
    fs::rename(staging, out_dir);
    return manifest;
  } catch (const fs::filesystem_error& e) {
    fs::remove_all(staging, ec);
    fail(ErrorCode::kIo, e.what());
  } catch (...) {
    fs::remove_all(staging, ec);
    throw;
  }
}

void VariantSpec::validate() const {
  if (values.empty()) fail(ErrorCode::kInvalidArgument, "variant axis '" + axis_name(axis) + "' has no values");
  fixed.validate();
}

std::vector<DatasetManifest> generate_variants(const VariantSpec& spec, const fs::path& out_dir, int jobs) {
  spec.validate();
  std::vector<std::pair<PipelineSettings, std::string>> variants;
  std::set<std::string> seen;
  for (const auto& v : spec.values) {
    auto applied = apply_axis_value(spec.fixed, spec.axis, v);
    if (!seen.insert(applied.second).second) {
      fail(ErrorCode::kInvalidArgument, "duplicate value '" + applied.second + "' on axis " + axis_name(spec.axis));
    }
    variants.push_back(std::move(applied));
  }

  const std::string digest = spec.fixed.digest();
  std::vector<DatasetManifest> manifests;
  std::vector<fs::path> written;
  try {
    for (const auto& [settings, value] : variants) {
      const fs::path dir = out_dir / (axis_name(spec.axis) + "=" + value);
      std::vector<std::pair<std::string, std::string>> provenance{
          {"axis", axis_name(spec.axis)},
          {"value", value},
          {"seed_base", std::to_string(spec.seed_base)},
          {"fixed_digest", digest},
          {"labeling_policy", labeling_kind_name(spec.fixed.labeling.kind)},
          {"base_manifest", spec.base_manifest.name},
      };
      manifests.push_back(
          render_dataset(spec.base_manifest, spec.base_manifest_path, settings, spec.seed_base, dir, provenance, jobs));
      written.push_back(dir);
      log::info("variant " + dir.filename().string() + ": " + std::to_string(spec.base_manifest.entries.size()) +
                " scenes");
    }
  } catch (...) {
    std::error_code ec;
    for (const auto& d : written) fs::remove_all(d, ec);
    throw;
  }
  return manifests;
}

}  // namespace camforge
