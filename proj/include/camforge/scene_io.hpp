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
#ifndef CAMFORGE_SCENE_IO_HPP_
#define CAMFORGE_SCENE_IO_HPP_

// Scene irradiance, bounding-box labels and dataset manifests, plus their
// on-disk formats:
//
//   scene bundle  <id>.meta (key=value) with either <id>.pfm (3-band color
//                 PFM) or <id>.b0.pfm, <id>.b1.pfm, ... (one grayscale PFM
//                 per band). PFMs are little-endian with scale -1.0.
//   labels        CSV, header class,x_min,y_min,x_max,y_max,distance_m,score.
//   manifest      "# camforge-manifest v1" text file.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace camforge {

/// Band-discretized photon irradiance, photons / s / um^2, stored planar as
/// [band][row][col].
struct SceneIrradiance {
  int width_px = 0;
  int height_px = 0;
  int bands = 0;
  std::vector<float> data;
  std::vector<std::string> band_names;
  std::string scene_id;
  double pixel_pitch_um = 1.0;

  std::size_t plane_size() const {
    return static_cast<std::size_t>(width_px) * static_cast<std::size_t>(height_px);
  }
  float at(int band, int row, int col) const {
    return data[static_cast<std::size_t>(band) * plane_size() +
                static_cast<std::size_t>(row) * width_px + col];
  }
  float& at(int band, int row, int col) {
    return data[static_cast<std::size_t>(band) * plane_size() +
                static_cast<std::size_t>(row) * width_px + col];
  }

  /// Allocates a zero scene with default band names.
  static SceneIrradiance zeros(int width, int height, int bands,
                               double pixel_pitch_um, std::string scene_id);

  friend bool operator==(const SceneIrradiance&, const SceneIrradiance&) = default;
};

/// Throws Error(kInvalidData / kDimensionMismatch) naming the first violation.
void validate_scene(const SceneIrradiance& scene);

SceneIrradiance load_scene(const std::filesystem::path& path);
void save_scene(const SceneIrradiance& scene, const std::filesystem::path& path);

/// Strips a trailing ".meta" so callers may pass either the bundle base or
/// the metadata file.
std::filesystem::path scene_bundle_base(const std::filesystem::path& path);

struct BoundingBox {
  double x_min = 0, y_min = 0, x_max = 0, y_max = 0;
  std::string cls;
  std::optional<double> distance_m;
  std::optional<double> score;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

/// Boxes for one scene. The same type holds ground truth and detections.
struct LabelSet {
  std::string scene_id;
  std::vector<BoundingBox> boxes;

  friend bool operator==(const LabelSet&, const LabelSet&) = default;
};
using DetectionSet = LabelSet;

void validate_box(const BoundingBox& box);

/// scene_id defaults to the file stem.
LabelSet load_labels(const std::filesystem::path& path,
                     std::optional<std::string> scene_id = std::nullopt);
void save_labels(const LabelSet& labels, const std::filesystem::path& path);
std::string labels_to_csv(const LabelSet& labels);

struct ManifestEntry {
  std::string scene_id;
  std::string scene_file;
  std::string label_file;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct DatasetManifest {
  std::string name;
  std::vector<ManifestEntry> entries;
  std::vector<std::pair<std::string, std::string>> provenance;

  const std::string* provenance_value(const std::string& key) const;

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

/// Entry paths are kept as written; relative paths are resolved against the
/// manifest's directory, and every referenced file must exist.
DatasetManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const DatasetManifest& manifest,
                   const std::filesystem::path& path);
std::string manifest_to_text(const DatasetManifest& manifest);
std::filesystem::path resolve_manifest_path(
    const std::filesystem::path& manifest_path, const std::string& entry_path);

}  // namespace camforge

#endif  // CAMFORGE_SCENE_IO_HPP_
