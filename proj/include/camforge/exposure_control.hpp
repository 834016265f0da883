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
#ifndef CAMFORGE_EXPOSURE_CONTROL_HPP_
#define CAMFORGE_EXPOSURE_CONTROL_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "camforge/scene_io.hpp"
#include "camforge/sensor_model.hpp"

namespace camforge {

enum class ExposureKind { kGlobal, kCenterWeighted, kBracketed };

std::string exposure_kind_name(ExposureKind kind);
ExposureKind parse_exposure_kind(const std::string& name);

/// Rectangle in normalized image coordinates.
struct NormalizedWindow {
  double x0 = 1.0 / 3.0;
  double x1 = 2.0 / 3.0;
  double y0 = 1.0 / 2.0;
  double y1 = 5.0 / 6.0;

  friend bool operator==(const NormalizedWindow&, const NormalizedWindow&) = default;
};

struct ExposurePolicy {
  ExposureKind kind = ExposureKind::kCenterWeighted;
  double target_fraction = 0.9;
  double max_duration_s = 0.016;
  std::vector<double> bracket_durations_s{0.002, 0.004, 0.008};
  double metering_percentile = 99.9;
  NormalizedWindow center_window;

  void validate() const;

  friend bool operator==(const ExposurePolicy&, const ExposurePolicy&) = default;
};

/// Pixels whose centers fall inside the window, as [col_begin, col_end) x
/// [row_begin, row_end). Errors when no pixel center is inside.
struct PixelRect {
  int col_begin, col_end, row_begin, row_end;
};
PixelRect window_pixels(const NormalizedWindow& window, int width, int height);

/// Nearest-rank percentile (p in (0,100]) of the values.
double nearest_rank_percentile(std::vector<double> values, double percentile);

/// Exposure duration from the noise-free voltage rate over the metering
/// region: min(target x swing / R, max_duration), R the metering percentile.
double meter(const SceneIrradiance& scene, const SensorConfig& config,
             const ExposurePolicy& policy);

RawFrame capture(const SceneIrradiance& scene, const SensorConfig& config,
                 const ExposurePolicy& policy, std::uint64_t seed);

/// Fuses bracketed frames (ascending exposures) into one frame at the longest
/// exposure. Per pixel, dn / exposure is averaged over frames below 0.98 of
/// full scale (the shortest frame when all are clipped), rescaled to the
/// longest exposure, then rounded and clamped to the configured bit depth.
RawFrame hdr_combine(std::span<const RawFrame> frames, const SensorConfig& config);

}  // namespace camforge

#endif  // CAMFORGE_EXPOSURE_CONTROL_HPP_
