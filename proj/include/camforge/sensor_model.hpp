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
#ifndef CAMFORGE_SENSOR_MODEL_HPP_
#define CAMFORGE_SENSOR_MODEL_HPP_

// Pixel and noise model: irradiance -> electrons -> volts -> digital numbers.
//
// Noise model: Poisson shot noise on the expected electron count plus
// additive Gaussian read noise, with a deterministic dark-current mean. No
// fixed-pattern noise. Each pixel draws from its own counter-based stream
// keyed by (seed, pixel index).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "camforge/scene_io.hpp"

namespace camforge {

struct FilterClass {
  std::string name;
  std::vector<double> band_weights;  // one weight in [0,1] per scene band

  friend bool operator==(const FilterClass&, const FilterClass&) = default;
};

/// A CFA tile repeated across the array (row-major filter ids).
struct CfaPattern {
  std::string name;
  int tile_width = 1;
  int tile_height = 1;
  std::vector<int> filter_ids;
  std::vector<FilterClass> filter_classes;

  int class_at(int row, int col) const {
    return filter_ids[static_cast<std::size_t>(row % tile_height) * tile_width +
                      col % tile_width];
  }

  /// Single clear class with unit weight on every band.
  static CfaPattern mono(int bands = 3);
  /// RGGB Bayer over R,G,B bands; classes are {R, G, B}.
  static CfaPattern bayer_rggb();
  /// Red at tile (0,0), clear elsewhere; classes are {C, R}.
  static CfaPattern rccc();
  /// Looks up "mono", "rggb" (alias "bayer", "rgb") or "rccc".
  static CfaPattern from_name(const std::string& name, int bands = 3);

  void validate() const;

  friend bool operator==(const CfaPattern&, const CfaPattern&) = default;
};

struct SensorConfig {
  std::string name = "custom";
  double pixel_pitch_um = 3.0;
  int array_width_px = 0;   // 0 means "same as the scene"
  int array_height_px = 0;
  CfaPattern cfa = CfaPattern::mono();
  std::vector<double> qe;  // per band; empty means 1.0 for every band
  double well_capacity_e = 5620.0;
  double read_noise_e = 10.0;
  double dark_current_e_per_s = 0.0;
  double conversion_gain_v_per_e = 1.8e-4;
  double voltage_swing_v = 1.0;
  int bit_depth = 10;
  double psf_fwhm_um = 0.0;
  bool shot_noise = true;
  std::optional<double> dynamic_range_db;  // declared by presets
  std::optional<double> die_width_mm;      // metadata only
  std::optional<double> die_height_mm;     // metadata only

  int max_dn() const { return (1 << bit_depth) - 1; }
  double qe_for_band(int band) const;

  /// Same sensor with shot and read noise disabled.
  SensorConfig noise_free() const;

  void validate() const;

  friend bool operator==(const SensorConfig&, const SensorConfig&) = default;
};

struct ElectronImage {
  int width = 0;
  int height = 0;
  std::vector<double> electrons;
  double exposure_s = 0.0;
  std::vector<std::uint8_t> saturated_mask;
};

struct RawFrame {
  int width = 0;
  int height = 0;
  std::vector<std::uint16_t> dn;
  int bit_depth = 10;
  CfaPattern cfa = CfaPattern::mono();
  double exposure_s = 0.0;
  std::vector<double> bracket_exposures_s;  // non-empty for fused captures
  std::string sensor_name;
  std::uint64_t rng_seed = 0;
  double pixel_pitch_um = 0.0;

  int max_dn() const { return (1 << bit_depth) - 1; }
  std::uint16_t at(int row, int col) const {
    return dn[static_cast<std::size_t>(row) * width + col];
  }

  friend bool operator==(const RawFrame&, const RawFrame&) = default;
};

/// Gaussian blur of each band, FWHM in micrometres at the scene pitch.
/// Half-sample symmetric borders keep each band's total exactly.
SceneIrradiance apply_psf(const SceneIrradiance& scene, double fwhm_um);

/// Normalized 1-D Gaussian taps (index 0 is the center tap) for sigma in
/// pixels; radius ceil(4 sigma).
std::vector<double> gaussian_taps(double sigma_px);

/// Integer r x r box binning to the sensor pitch. Irradiance is per area, so
/// each output sample is the block mean; trailing rows/cols that do not fill
/// a block are dropped.
SceneIrradiance resample_scene_to_sensor(const SceneIrradiance& scene,
                                         const SensorConfig& config);

/// Integer ratio sensor_pitch / scene_pitch, or an error when not integral.
int pitch_ratio(double scene_pitch_um, double sensor_pitch_um);

/// Placement of a resampled scene on the sensor array: the array is centered
/// on the scene and the scene must cover it.
struct SensorWindow {
  int offset_x = 0;
  int offset_y = 0;
  int width = 0;
  int height = 0;
};
SensorWindow sensor_window(int scene_width, int scene_height,
                           const SensorConfig& config);
SceneIrradiance crop_scene(const SceneIrradiance& scene, const SensorWindow& window);

/// Noise-free electrons per pixel for the given exposure (signal plus dark
/// current), before any clipping.
std::vector<double> expected_electrons(const SceneIrradiance& scene,
                                       const SensorConfig& config,
                                       double exposure_s);

ElectronImage expose(const SceneIrradiance& scene, const SensorConfig& config,
                     double exposure_s, std::uint64_t seed);

/// Digital number for a voltage: min(2^N - 1, floor(v / swing * 2^N)) after
/// clamping v to [0, swing].
std::uint16_t quantize_voltage(double volts, double voltage_swing_v, int bit_depth);

RawFrame quantize(const ElectronImage& electrons, const SensorConfig& config);

/// Presets "mt9v024-mono", "mt9v024-rgb" and "mt9v024-rccc" at pitch 1.5, 3,
/// 4.5 or 6 um. Electrical constants (well 5620 e-, read noise 10 e-) are
/// chosen to give the 55 dB linear dynamic range of the reference part.
/// A clear filter sums every band, so a mono sensor takes the scene's band
/// count; a uniform qe list follows along. Other sensors are returned as is.
SensorConfig fit_mono_to_bands(SensorConfig config, int bands);

SensorConfig make_preset(const std::string& name, double pitch_um);

}  // namespace camforge

#endif  // CAMFORGE_SENSOR_MODEL_HPP_
