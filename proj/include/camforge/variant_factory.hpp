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
#ifndef CAMFORGE_VARIANT_FACTORY_HPP_
#define CAMFORGE_VARIANT_FACTORY_HPP_

// Single-parameter dataset variants. A base manifest of scene irradiance is
// rendered once per axis value with every other setting held fixed and with
// per-scene noise seeds shared across variants.
//
// Output layout: <out>/<axis>=<value>/{scenes/,labels/,manifest.txt}.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "camforge/exposure_control.hpp"
#include "camforge/isp_pipeline.hpp"
#include "camforge/scene_io.hpp"
#include "camforge/sensor_model.hpp"

namespace camforge {

enum class LabelingKind { kNone, kKittiMinBox, kDistanceCutoff };

struct LabelingPolicy {
  LabelingKind kind = LabelingKind::kNone;
  int min_box_height_px = 25;
  double max_distance_m = 150.0;

  void validate() const;

  friend bool operator==(const LabelingPolicy&, const LabelingPolicy&) = default;
};

std::string labeling_kind_name(LabelingKind kind);
LabelingKind parse_labeling_kind(const std::string& name);

/// Multiplies every coordinate by `factor`; class and distance unchanged.
LabelSet scale_labels(const LabelSet& labels, double factor);

/// KittiMinBox keeps boxes taller than min_box_height_px (strictly);
/// DistanceCutoff keeps boxes with distance_m <= max_distance_m. Order is
/// preserved.
LabelSet apply_policy(const LabelSet& labels, const LabelingPolicy& policy);
/// Applies the policy to every set; a DistanceCutoff error lists every scene
/// whose labels lack distances.
std::vector<LabelSet> apply_policy(const std::vector<LabelSet>& label_sets, const LabelingPolicy& policy);

enum class GammaMode { kNone, kFixed, kAdaptive };

/// Everything that determines how one scene is rendered.
struct PipelineSettings {
  SensorConfig sensor;
  ExposurePolicy exposure;
  bool demosaic = false;
  GammaMode gamma_mode = GammaMode::kNone;
  double gamma_value = 1.0;
  int output_depth = 16;
  LabelingPolicy labeling;

  void validate() const;
  /// Flat key=value description in config-key form, in a fixed order.
  std::vector<std::pair<std::string, std::string>> describe() const;
  /// FNV-1a over describe(), as 16 hex digits.
  std::string digest() const;

  friend bool operator==(const PipelineSettings&, const PipelineSettings&) = default;
};

enum class VariantAxis { kPixelPitch, kBitDepth, kCfa, kExposurePolicy, kGamma, kDemosaic };

std::string axis_name(VariantAxis axis);
VariantAxis parse_axis(const std::string& name);
bool axis_is_geometric(VariantAxis axis);

/// Returns `base` with one axis replaced by `value`; also returns the
/// canonical spelling of the value.
std::pair<PipelineSettings, std::string> apply_axis_value(const PipelineSettings& base, VariantAxis axis,
                                                          const std::string& value);

struct RenderedScene {
  RawFrame raw;
  std::optional<ProcessedImage> processed;
  LabelSet labels;
  SensorWindow window;
  int binning = 1;
};

/// resample -> PSF -> crop to the array -> capture -> ISP, plus the matching
/// label transform (divide by the binning factor, shift by the crop offset,
/// clip to the array, then the labeling policy).
RenderedScene render_scene(const SceneIrradiance& scene, const LabelSet& labels,
                           const PipelineSettings& settings, std::uint64_t seed);

/// Per-scene noise seed, shared by every variant of a spec.
std::uint64_t scene_seed(std::uint64_t seed_base, const std::string& scene_id);

/// Renders every entry of a manifest into out_dir (scenes/, labels/,
/// manifest.txt). The directory is built beside its final location and
/// renamed into place, so a failure leaves nothing behind.
DatasetManifest render_dataset(const DatasetManifest& base, const std::filesystem::path& base_manifest_path,
                               const PipelineSettings& settings, std::uint64_t seed_base,
                               const std::filesystem::path& out_dir,
                               std::vector<std::pair<std::string, std::string>> provenance, int jobs);

struct VariantSpec {
  DatasetManifest base_manifest;
  std::filesystem::path base_manifest_path;
  VariantAxis axis = VariantAxis::kBitDepth;
  std::vector<std::string> values;
  PipelineSettings fixed;
  std::uint64_t seed_base = 0;

  void validate() const;
};

std::vector<DatasetManifest> generate_variants(const VariantSpec& spec, const std::filesystem::path& out_dir,
                                               int jobs = 1);

}  // namespace camforge

#endif  // CAMFORGE_VARIANT_FACTORY_HPP_
